"""JSON analysis configs: strict parsing, defaults and serialization.

A config selects exactly one backend by carrying either a ``"reduced"``
section (``A``, ``B``, ``C``) or a ``"geometric"`` section (the
:class:`~tenstab.geometry.MechanismGeometry` fields). Angles are radians.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .energy import EnergyModel, GeometricModel, ReducedModel
from .export import atomic_write_text
from .geometry import MechanismGeometry
from .stability import BETA_MAX, DEDUP_TOL, EIG_TOL, GRAD_TOL, N_SEEDS

log = logging.getLogger(__name__)

HALF_PI = math.pi / 2


class ConfigError(ValueError):
    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class Tolerances:
    grad_tol: float = GRAD_TOL
    eig_tol: float = EIG_TOL
    dedup_tol: float = DEDUP_TOL


@dataclass(frozen=True)
class AnalysisConfig:
    reduced: tuple | None = None  # (A, B, C)
    geometry: MechanismGeometry | None = None
    k_list: tuple = (1.0,)
    beta_range: tuple = (-HALF_PI, HALF_PI)
    alpha_range: tuple = (-HALF_PI, HALF_PI)
    beta_max: float = BETA_MAX
    n_seeds: int = N_SEEDS
    grid_2d: tuple = (8, 8)
    landscape_points: int = 721
    tolerances: Tolerances = field(default_factory=Tolerances)
    beta_tol: float = 0.05
    k_bracket: tuple = (0.1, 1000.0)
    fit_samples: int = 25
    output_dir: str = "out"

    @property
    def backend(self) -> str:
        return "reduced" if self.reduced is not None else "geometric"

    def model(self, k: float | None = None) -> EnergyModel:
        k = self.k_list[0] if k is None else k
        if self.reduced is not None:
            return ReducedModel(*self.reduced, k=k)
        return GeometricModel(self.geometry, k)

    def solver_opts(self) -> dict:
        t = self.tolerances
        return dict(n_seeds=self.n_seeds, grad_tol=t.grad_tol, eig_tol=t.eig_tol,
                    dedup_tol=t.dedup_tol)


_TOP_KEYS = {
    "reduced", "geometric", "k", "k_list", "beta_range", "alpha_range", "beta_max",
    "n_seeds", "grid_2d", "landscape_points", "tolerances", "beta_tol", "k_bracket",
    "fit_samples", "output_dir",
}
_GEOM_FIELDS = [f.name for f in dataclasses.fields(MechanismGeometry)]
_GEOM_REQUIRED = {"r_f", "w"}


def _number(value, name, *, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", name)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", name)
    if positive and value <= 0:
        raise ConfigError(f"must be > 0, got {value:g}", name)
    if nonneg and value < 0:
        raise ConfigError(f"must be >= 0, got {value:g}", name)
    return value


def _integer(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", name)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", name)
    return value


def _interval(value, name, *, positive=False):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected a [low, high] pair", name)
    lo = _number(value[0], f"{name}[0]", positive=positive)
    hi = _number(value[1], f"{name}[1]", positive=positive)
    if not lo < hi:
        raise ConfigError(f"empty interval [{lo:g}, {hi:g}]", name)
    return (lo, hi)


def _reject_unknown(data, allowed, where):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown key(s) {', '.join(prefix + u for u in unknown)}",
                          prefix + unknown[0])


def _parse_geometry(data, defaults):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", "geometric")
    _reject_unknown(data, _GEOM_FIELDS, "geometric")
    missing = sorted(_GEOM_REQUIRED - set(data))
    if missing:
        raise ConfigError("required field missing", f"geometric.{missing[0]}")
    kwargs = {}
    for name in _GEOM_FIELDS:
        if name not in data:
            defaults.append(f"geometric.{name}")
            continue
        value = data[name]
        key = f"geometric.{name}"
        if name == "tension_only":
            if not isinstance(value, bool):
                raise ConfigError(f"expected true/false, got {value!r}", key)
            kwargs[name] = value
        elif name.endswith("_angles"):
            if not isinstance(value, list) or len(value) != 3:
                raise ConfigError("expected three angles in radians", key)
            kwargs[name] = tuple(_number(v, f"{key}[{i}]") for i, v in enumerate(value))
        else:
            kwargs[name] = _number(value, key)
    try:
        return MechanismGeometry(**kwargs)
    except ValueError as exc:
        name = next((n for n in _GEOM_FIELDS if str(exc).startswith(n)), None)
        raise ConfigError(str(exc), f"geometric.{name}" if name else "geometric") from None


def parse_config(data: dict) -> tuple[AnalysisConfig, list[str]]:
    """Validate a decoded config; returns the config and the keys that took defaults."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    _reject_unknown(data, _TOP_KEYS, "")
    has_r, has_g = "reduced" in data, "geometric" in data
    if has_r and has_g:
        raise ConfigError("give exactly one of 'reduced' or 'geometric', not both", "reduced")
    if not (has_r or has_g):
        raise ConfigError("one of 'reduced' or 'geometric' is required", "reduced")

    defaults: list[str] = []
    kw: dict = {}
    if has_r:
        sec = data["reduced"]
        if not isinstance(sec, dict):
            raise ConfigError("expected an object", "reduced")
        _reject_unknown(sec, ("A", "B", "C"), "reduced")
        for name in ("A", "B", "C"):
            if name not in sec:
                raise ConfigError("required field missing", f"reduced.{name}")
        kw["reduced"] = tuple(_number(sec[n], f"reduced.{n}") for n in ("A", "B", "C"))
    else:
        kw["geometry"] = _parse_geometry(data["geometric"], defaults)

    if "k" in data and "k_list" in data:
        raise ConfigError("give either 'k' or 'k_list', not both", "k")
    if "k" in data:
        kw["k_list"] = (_number(data["k"], "k", positive=True),)
    elif "k_list" in data:
        ks = data["k_list"]
        if not isinstance(ks, list) or not ks:
            raise ConfigError("expected a non-empty list", "k_list")
        ks = [_number(v, f"k_list[{i}]", positive=True) for i, v in enumerate(ks)]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigError("must be strictly increasing", "k_list")
        kw["k_list"] = tuple(ks)
    else:
        raise ConfigError("one of 'k' or 'k_list' is required", "k")

    def opt(key, parse):
        if key in data:
            kw[key] = parse(data[key], key)
        else:
            defaults.append(key)

    opt("beta_range", _interval)
    opt("alpha_range", _interval)
    opt("beta_max", lambda v, n: _number(v, n, positive=True))
    opt("n_seeds", lambda v, n: _integer(v, n, 8))
    opt("landscape_points", lambda v, n: _integer(v, n, 2))
    opt("beta_tol", lambda v, n: _number(v, n, positive=True))
    opt("k_bracket", lambda v, n: _interval(v, n, positive=True))
    opt("fit_samples", lambda v, n: _integer(v, n, 3))

    if "grid_2d" in data:
        g = data["grid_2d"]
        if not isinstance(g, list) or len(g) != 2:
            raise ConfigError("expected [n_alpha, n_beta]", "grid_2d")
        kw["grid_2d"] = (_integer(g[0], "grid_2d[0]", 8), _integer(g[1], "grid_2d[1]", 8))
    else:
        defaults.append("grid_2d")

    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict):
            raise ConfigError("expected an object", "tolerances")
        names = [f.name for f in dataclasses.fields(Tolerances)]
        _reject_unknown(t, names, "tolerances")
        for n in names:
            if n not in t:
                defaults.append(f"tolerances.{n}")
        kw["tolerances"] = Tolerances(
            **{n: _number(v, f"tolerances.{n}", positive=True) for n, v in t.items()})
    else:
        defaults.append("tolerances")

    if "output_dir" in data:
        if not isinstance(data["output_dir"], str) or not data["output_dir"]:
            raise ConfigError("expected a non-empty path string", "output_dir")
        kw["output_dir"] = data["output_dir"]
    else:
        defaults.append("output_dir")

    return AnalysisConfig(**kw), defaults


PRESETS = ("paper.json", "paper_geometric.json")


def resolve_config_path(path) -> Path | None:
    """``path`` itself, or the bundled preset of the same name when absent."""
    p = Path(path)
    if p.exists():
        return p
    if p.name in PRESETS and len(p.parts) == 1:
        return Path(str(resources.files("tenstab") / "presets" / p.name))
    return None


def load_config(path) -> AnalysisConfig:
    resolved = resolve_config_path(path)
    if resolved is None:
        raise ConfigError(f"config file not found: {path}")
    if resolved != Path(path):
        log.info("using bundled preset %s", resolved.name)
    text = resolved.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    cfg, defaults = parse_config(data)
    for key in defaults:
        log.info("default %s = %s", key, _default_repr(cfg, key))
    return cfg


def _default_repr(cfg, key):
    if key.startswith("geometric."):
        return getattr(cfg.geometry, key.split(".", 1)[1])
    if key.startswith("tolerances."):
        return getattr(cfg.tolerances, key.split(".", 1)[1])
    return getattr(cfg, key)


def to_dict(cfg: AnalysisConfig) -> dict:
    out: dict = {}
    if cfg.reduced is not None:
        out["reduced"] = dict(zip(("A", "B", "C"), cfg.reduced))
    else:
        g = dataclasses.asdict(cfg.geometry)
        g["base_angles"] = list(g["base_angles"])
        g["platform_angles"] = list(g["platform_angles"])
        out["geometric"] = g
    out["k_list"] = list(cfg.k_list)
    for key in ("beta_range", "alpha_range", "grid_2d", "k_bracket"):
        out[key] = list(getattr(cfg, key))
    for key in ("beta_max", "n_seeds", "landscape_points", "beta_tol", "fit_samples",
                "output_dir"):
        out[key] = getattr(cfg, key)
    out["tolerances"] = dataclasses.asdict(cfg.tolerances)
    return out


def write_config(cfg: AnalysisConfig, path) -> None:
    atomic_write_text(path, json.dumps(to_dict(cfg), indent=2) + "\n")
