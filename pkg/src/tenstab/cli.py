"""``stab`` command line.

    stab landscape|equilibria|sweep|critical-k|fit --config <path>
         [--out <dir>] [--svg] [--degrees] [--verify]

Exit status: 0 on success, 2 on input or validation errors, 3 when
``--verify`` finds an analytic/finite-difference mismatch, 1 for I/O failures.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import stability as st
from .config import AnalysisConfig, ConfigError, load_config
from .energy import (
    REFERENCE_COEFFICIENTS,
    DegenerateFitError,
    ReducedModel,
    fd_gradient,
    fit_reduced_coefficients,
    total_energy,
)
from .export import k_tag, landscape_rows, write_csv, write_landscape_svg
from .geometry import TiltConfig

log = logging.getLogger("tenstab")

EXIT_INPUT = 2
EXIT_VERIFY = 3


class VerifyError(RuntimeError):
    pass


def _angle(x, degrees):
    return math.degrees(x) if degrees else x


def _angle_col(name, degrees):
    return f"{name}_deg" if degrees else f"{name}_rad"


def _threads(n_jobs):
    env = os.environ.get("STAB_THREADS")
    if env is None:
        return n_jobs
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"STAB_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise ConfigError(f"STAB_THREADS must be >= 1, got {n}")
    return n


def verify_gradients(cfg: AnalysisConfig, n_beta=9, rel_tol=1e-6, step=1e-6):
    """Compare analytic and central-difference gradients over the configured ranges."""
    betas = np.linspace(*cfg.beta_range, n_beta)
    alphas = [0.0] if cfg.backend == "reduced" else np.linspace(*cfg.alpha_range, 3)
    worst = 0.0
    for k in cfg.k_list:
        model = cfg.model(k)
        for a in alphas:
            for b in betas:
                c = TiltConfig(float(a), float(b))
                g = total_energy(model, c).grad
                err = np.linalg.norm(g - fd_gradient(model, c, step))
                rel = err / max(np.linalg.norm(g), 1.0)
                worst = max(worst, rel)
                if rel >= rel_tol:
                    raise VerifyError(
                        f"gradient mismatch at k={k:g}, alpha={a:.6g}, beta={b:.6g}: "
                        f"relative error {rel:.3g} >= {rel_tol:g}"
                    )
    log.info("verify: analytic gradients agree with finite differences (worst %.2g)", worst)


def cmd_landscape(cfg: AnalysisConfig, out: Path, svg=False, degrees=False):
    betas = np.linspace(*cfg.beta_range, cfg.landscape_points)
    header = [_angle_col("beta", degrees), "u_total", "u_spring", "u_gravity"]
    written = []
    for k in cfg.k_list:
        rows = landscape_rows(cfg.model(k), betas)
        path = out / f"landscape_{k_tag(k)}.csv"
        write_csv(path, header, [(_angle(r[0], degrees),) + r[1:] for r in rows])
        written.append(path)
        if svg:
            spath = out / f"landscape_{k_tag(k)}.svg"
            write_landscape_svg(spath, betas, [r[1] for r in rows], k, degrees)
            written.append(spath)
    return written


def equilibria_for(cfg: AnalysisConfig, k: float):
    model = cfg.model(k)
    opts = cfg.solver_opts()
    if cfg.backend == "reduced":
        return st.find_equilibria_1d(model, cfg.beta_range, **opts)
    opts.pop("n_seeds")
    return st.find_equilibria_2d(model, (cfg.alpha_range, cfg.beta_range), cfg.grid_2d, **opts)


def cmd_equilibria(cfg: AnalysisConfig, out: Path, degrees=False):
    header = [_angle_col("alpha", degrees), _angle_col("beta", degrees), "u_total",
              "classification", "grad_norm", "within_operational_range"]
    written = []
    for k in cfg.k_list:
        eqs = equilibria_for(cfg, k)
        rows = [(_angle(e.cfg.alpha, degrees), _angle(e.cfg.beta, degrees), e.u_total,
                 e.classification, e.grad_norm, e.within(cfg.beta_max)) for e in eqs]
        path = out / f"equilibria_{k_tag(k)}.csv"
        write_csv(path, header, rows)
        written.append(path)
        if not eqs:
            print(f"k={k:g}: no equilibrium in range")
        for e in eqs:
            flag = "within" if e.within(cfg.beta_max) else "OUTSIDE"
            print(f"k={k:g}: {e.classification} at beta={_angle(e.cfg.beta, degrees):.9g} "
                  f"({flag} |beta| <= {cfg.beta_max:g})")
    return written


def cmd_sweep(cfg: AnalysisConfig, out: Path, degrees=False):
    result = st.stiffness_sweep(cfg.model(), cfg.k_list, cfg.beta_range, cfg.beta_max,
                                workers=_threads(len(cfg.k_list)), **cfg.solver_opts())
    header = ["k", _angle_col("beta_star", degrees), "u_star", "classification",
              "within_operational_range"]
    rows = [(r.k, _angle(r.beta_star, degrees), r.u_star, r.classification,
             r.within_operational_range) for r in result.rows]
    path = out / "sweep.csv"
    write_csv(path, header, rows)
    return [path]


def cmd_critical_k(cfg: AnalysisConfig, beta_tol=None):
    beta_tol = cfg.beta_tol if beta_tol is None else beta_tol
    k_star = st.critical_stiffness(cfg.model(), beta_tol, cfg.k_bracket, cfg.beta_range,
                                   **cfg.solver_opts())
    print(f"k_star = {k_star:.9g} N/mm  (beta_tol = {beta_tol:g} rad)")
    model = cfg.model()
    if isinstance(model, ReducedModel):
        closed = st.reduced_critical_stiffness(model, beta_tol)
        rel = abs(k_star - closed) / closed
        print(f"closed form A/(C tan(beta_tol)) = {closed:.9g} N/mm  (relative diff {rel:.2g})")
    return k_star


def cmd_fit(cfg: AnalysisConfig):
    samples = np.linspace(*cfg.beta_range, cfg.fit_samples)
    k = cfg.k_list[0]
    fit = fit_reduced_coefficients(cfg.model(k), samples)
    print(f"fit of A sin(b) + B k - C k cos(b) at k = {k:g} N/mm, "
          f"{cfg.fit_samples} samples over [{cfg.beta_range[0]:.6g}, {cfg.beta_range[1]:.6g}]")
    print(f"{'coef':>4}  {'fitted':>16}  {'reference':>10}  {'rel diff':>10}")
    for name, value, ref in zip("ABC", (fit.A, fit.B, fit.C), REFERENCE_COEFFICIENTS):
        print(f"{name:>4}  {value:16.9g}  {ref:10.6g}  {(value - ref) / ref:10.3g}")
    print(f"max residual = {fit.residual:.3g} N mm")
    return fit


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config path or bundled preset name")
    common.add_argument("--out", help="output directory (overrides config output_dir)")
    common.add_argument("--svg", action="store_true", help="also write SVG landscape charts")
    common.add_argument("--degrees", action="store_true", help="report angles in degrees")
    common.add_argument("--verify", action="store_true",
                        help="check analytic gradients against finite differences first")
    common.add_argument("-q", "--quiet", action="store_true", help="only print warnings")

    parser = argparse.ArgumentParser(prog="stab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("landscape", parents=[common], help="energy along alpha = 0 per k")
    sub.add_parser("equilibria", parents=[common], help="stationary points per k")
    sub.add_parser("sweep", parents=[common], help="stable deflection versus k")
    ck = sub.add_parser("critical-k", parents=[common], help="minimal k for a deflection bound")
    ck.add_argument("--beta-tol", type=float, help="override config beta_tol (rad)")
    sub.add_parser("fit", parents=[common], help="fit reduced coefficients to the model")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr,
                        force=True)
    try:
        cfg = load_config(args.config)
        if args.verify:
            verify_gradients(cfg)
        out = Path(args.out or cfg.output_dir)
        written = []
        if args.command in ("landscape", "equilibria", "sweep"):
            out.mkdir(parents=True, exist_ok=True)
        if args.command == "landscape":
            written = cmd_landscape(cfg, out, args.svg, args.degrees)
        elif args.command == "equilibria":
            written = cmd_equilibria(cfg, out, args.degrees)
        elif args.command == "sweep":
            written = cmd_sweep(cfg, out, args.degrees)
        elif args.command == "critical-k":
            if args.beta_tol is not None and not args.beta_tol > 0:
                raise ConfigError("must be > 0", "--beta-tol")
            cmd_critical_k(cfg, args.beta_tol)
        else:
            cmd_fit(cfg)
        for path in written:
            print(f"wrote {path}")
    except (ConfigError, st.BracketError, DegenerateFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerifyError as exc:
        print(f"VERIFY FAILED: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
