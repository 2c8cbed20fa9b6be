"""Deterministic CSV tables and optional SVG landscape charts."""
from __future__ import annotations

import io
import math
import os
import tempfile
from pathlib import Path

import numpy as np

SIG_DIGITS = 9


def _atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    _atomic_write(path, text.encode("utf-8"))


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if value == 0.0:
            return "0"  # folds -0.0 as well
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    atomic_write_text(path, csv_text(header, rows))


def k_tag(k: float) -> str:
    return f"k{k:g}"


def landscape_rows(model, betas):
    from .energy import total_energy
    from .geometry import TiltConfig

    rows = []
    for b in betas:
        ev = total_energy(model, TiltConfig(0.0, float(b)))
        rows.append((float(b), ev.u_total, ev.u_spring, ev.u_gravity))
    return rows


def write_landscape_svg(path, betas, u_total, k, degrees=False) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = np.degrees(betas) if degrees else np.asarray(betas)
    u = np.asarray(u_total)
    i = int(np.argmin(u))
    with matplotlib.rc_context({"svg.hashsalt": "tenstab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(x, u, color="tab:blue", lw=1.5)
        ax.plot([x[i]], [u[i]], "o", color="tab:red")
        ax.annotate(f"min at {x[i]:.4g}", (x[i], u[i]), textcoords="offset points",
                    xytext=(8, 8))
        ax.set_xlabel("beta [deg]" if degrees else "beta [rad]")
        ax.set_ylabel("U_total [N mm]")
        ax.set_title(f"Total potential energy, k = {k:g} N/mm")
        ax.grid(True, alpha=0.3)
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    _atomic_write(path, buf.getvalue())
