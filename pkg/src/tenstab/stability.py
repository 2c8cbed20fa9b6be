"""Equilibria of the joint energy, their classification and stiffness studies."""
from __future__ import annotations

import enum
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .energy import EnergyModel, GeometricModel, ReducedModel, total_energy
from .geometry import TiltConfig

log = logging.getLogger(__name__)

GRAD_TOL = 1e-9
EIG_TOL = 1e-9
DEDUP_TOL = 1e-6
BETA_MAX = 0.3  # assumed joint travel limit, rad
DEFAULT_RANGE = (-math.pi / 2, math.pi / 2)
N_SEEDS = 64


class BracketError(ValueError):
    """The stiffness bracket does not straddle the requested deflection."""


class Stability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SADDLE = "Saddle"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value


def classify(eigs, eig_tol: float = EIG_TOL) -> Stability:
    eigs = np.atleast_1d(eigs)
    if np.any(np.abs(eigs) <= eig_tol):
        return Stability.DEGENERATE
    if np.all(eigs > 0):
        return Stability.STABLE
    if np.all(eigs < 0):
        return Stability.UNSTABLE
    return Stability.SADDLE


@dataclass(frozen=True)
class Equilibrium:
    """A stationary point.

    ``hessian_eigs`` has one entry for alpha = 0 searches (d2U/dbeta2) and two
    for full-joint searches. ``interval`` is set only for flat Degenerate
    stretches, in which case ``cfg`` is the interval midpoint.
    """

    cfg: TiltConfig
    u_total: float
    grad_norm: float
    classification: Stability
    hessian_eigs: tuple
    interval: tuple | None = None

    def within(self, beta_max: float = BETA_MAX) -> bool:
        return abs(self.cfg.beta) <= beta_max


def _check_range(lo, hi, name="beta_range"):
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"{name} must be a finite non-empty interval, got [{lo}, {hi}]")


def _slice(model, beta):
    ev = total_energy(model, TiltConfig(0.0, beta))
    if not math.isfinite(ev.u_total):
        raise ValueError(f"non-finite energy at beta={beta}")
    return float(ev.grad[1]), float(ev.hessian[1, 1]), float(ev.u_total)


def _safeguarded_newton(f, lo, hi, flo, fhi, tol, max_iter=200):
    """Newton iteration kept inside a sign-change bracket, bisecting when needed."""
    if flo > 0:
        lo, hi, flo, fhi = hi, lo, fhi, flo  # keep f(lo) < 0 < f(hi)
    x = 0.5 * (lo + hi)
    fx, dfx = f(x)
    for _ in range(max_iter):
        if abs(fx) < tol:
            break
        if fx < 0:
            lo = x
        else:
            hi = x
        step_ok = dfx != 0 and math.isfinite(dfx)
        if step_ok:
            xn = x - fx / dfx
            step_ok = min(lo, hi) < xn < max(lo, hi)
        x_new = xn if step_ok else 0.5 * (lo + hi)
        if x_new == x or abs(hi - lo) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
        x = x_new
        fx, dfx = f(x)
    return x


def find_equilibria_1d(
    model: EnergyModel,
    beta_range=DEFAULT_RANGE,
    n_seeds: int = N_SEEDS,
    grad_tol: float = GRAD_TOL,
    eig_tol: float = EIG_TOL,
    dedup_tol: float = DEDUP_TOL,
) -> list[Equilibrium]:
    """Stationary points of ``U(0, beta)`` over ``beta_range``.

    Sign changes of dU/dbeta on a uniform seed grid are polished by a
    bracketed Newton iteration. Results are sorted by beta.
    """
    lo, hi = map(float, beta_range)
    _check_range(lo, hi)
    if n_seeds < 8:
        raise ValueError(f"n_seeds must be >= 8, got {n_seeds}")
    seeds = np.linspace(lo, hi, n_seeds)
    g = np.array([_slice(model, b)[0] for b in seeds])
    flat = np.abs(g) < grad_tol

    f = lambda b: _slice(model, b)[:2]
    roots: list[float] = []
    intervals: list[tuple[float, float]] = []
    i = 0
    while i < n_seeds - 1:
        if flat[i] and flat[i + 1]:
            j = i + 1
            while j + 1 < n_seeds and flat[j + 1]:
                j += 1
            intervals.append((float(seeds[i]), float(seeds[j])))
            i = j + 1
            continue
        if flat[i]:
            roots.append(float(seeds[i]))
        elif not flat[i + 1] and g[i] * g[i + 1] < 0:
            roots.append(_safeguarded_newton(f, seeds[i], seeds[i + 1], g[i], g[i + 1], grad_tol))
        i += 1
    if flat[-1] and not (n_seeds >= 2 and flat[-2]):
        roots.append(float(seeds[-1]))

    out: list[Equilibrium] = []
    for a, b in intervals:
        mid = 0.5 * (a + b)
        grad, d2, u = _slice(model, mid)
        out.append(Equilibrium(TiltConfig(0.0, float(mid)), u, abs(grad), Stability.DEGENERATE,
                               (float(d2),), (float(a), float(b))))
    for beta in sorted(roots):
        if any(abs(beta - e.cfg.beta) < dedup_tol for e in out if e.interval is None):
            continue
        if any(a <= beta <= b for a, b in intervals):
            continue
        grad, d2, u = _slice(model, beta)
        if abs(grad) >= grad_tol:
            log.warning("root at beta=%.12g stalled at |dU/dbeta|=%.3g", beta, abs(grad))
        out.append(Equilibrium(TiltConfig(0.0, float(beta)), u, abs(grad),
                               classify(d2, eig_tol), (float(d2),)))
    out.sort(key=lambda e: e.cfg.beta)
    return out


def _newton_2d(model, x0, box, grad_tol, max_iter=100, max_step=0.5):
    (alo, ahi), (blo, bhi) = box
    x = np.array(x0, dtype=float)
    ev = total_energy(model, TiltConfig(*x))
    for _ in range(max_iter):
        if not (alo - 1e-9 <= x[0] <= ahi + 1e-9 and blo - 1e-9 <= x[1] <= bhi + 1e-9):
            return None, None
        gn = np.linalg.norm(ev.grad)
        if gn < grad_tol:
            return x, ev
        try:
            step = -np.linalg.solve(ev.hessian, ev.grad)
        except np.linalg.LinAlgError:
            return None, None
        if not np.all(np.isfinite(step)):
            return None, None
        sn = np.linalg.norm(step)
        if sn > max_step:
            step *= max_step / sn
        # backtrack on |grad| so saddles and maxima are reachable too
        t = 1.0
        while t > 1e-4:
            xn = x + t * step
            evn = total_energy(model, TiltConfig(*xn))
            if np.linalg.norm(evn.grad) < gn:
                break
            t *= 0.5
        else:
            x, ev = x + step, total_energy(model, TiltConfig(*(x + step)))
            continue
        x, ev = xn, evn
    inside = alo - 1e-9 <= x[0] <= ahi + 1e-9 and blo - 1e-9 <= x[1] <= bhi + 1e-9
    return (x, ev) if inside and np.linalg.norm(ev.grad) < grad_tol else (None, None)


def find_equilibria_2d(
    model: GeometricModel,
    box=(DEFAULT_RANGE, DEFAULT_RANGE),
    grid=(8, 8),
    grad_tol: float = GRAD_TOL,
    eig_tol: float = EIG_TOL,
    dedup_tol: float = DEDUP_TOL,
) -> list[Equilibrium]:
    """Multi-start Newton search for stationary points over an (alpha, beta) box.

    Seeds that diverge, stall or leave the box are skipped.
    """
    if not isinstance(model, GeometricModel):
        raise TypeError("find_equilibria_2d needs a GeometricModel")
    (alo, ahi), (blo, bhi) = [tuple(map(float, r)) for r in box]
    _check_range(alo, ahi, "alpha_range")
    _check_range(blo, bhi, "beta_range")
    na, nb = grid
    if na < 8 or nb < 8:
        raise ValueError(f"grid must be at least 8x8, got {na}x{nb}")
    box = ((alo, ahi), (blo, bhi))

    found: list[Equilibrium] = []
    for a0, b0 in itertools.product(np.linspace(alo, ahi, na), np.linspace(blo, bhi, nb)):
        x, ev = _newton_2d(model, (a0, b0), box, grad_tol)
        if x is None:
            log.debug("seed (%.4g, %.4g) skipped: no convergence inside box", a0, b0)
            continue
        if any(np.hypot(x[0] - e.cfg.alpha, x[1] - e.cfg.beta) < dedup_tol for e in found):
            continue
        eigs = np.linalg.eigvalsh(ev.hessian)
        found.append(Equilibrium(TiltConfig(float(x[0]), float(x[1])), float(ev.u_total),
                                 float(np.linalg.norm(ev.grad)), classify(eigs, eig_tol),
                                 tuple(float(v) for v in eigs)))
    found.sort(key=lambda e: (e.cfg.alpha, e.cfg.beta))
    return found


def no_rest_at_zero_check(model: EnergyModel, grad_tol: float = GRAD_TOL):
    """Slope dU/dbeta at the home pose and whether it vanishes."""
    slope = float(total_energy(model, TiltConfig(0.0, 0.0)).grad[1])
    return slope, abs(slope) < grad_tol


def preferred_stable(equilibria) -> Equilibrium | None:
    """Lowest-energy stable point; near-ties go to the smaller |beta|."""
    stable = [e for e in equilibria if e.classification is Stability.STABLE]
    if not stable:
        return None
    u_min = min(e.u_total for e in stable)
    ties = [e for e in stable if e.u_total - u_min <= 1e-12]
    return min(ties, key=lambda e: abs(e.cfg.beta))


@dataclass(frozen=True)
class SweepRow:
    k: float
    beta_star: float
    u_star: float
    classification: Stability | None
    within_operational_range: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    beta_max: float = BETA_MAX

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def _workers(n_jobs, workers):
    if workers is None:
        return 1
    return max(1, min(int(workers), n_jobs))


def stiffness_sweep(
    model: EnergyModel,
    k_list,
    beta_range=DEFAULT_RANGE,
    beta_max: float = BETA_MAX,
    workers: int | None = None,
    **solver_opts,
) -> SweepResult:
    """Preferred stable deflection for each stiffness in ``k_list``.

    ``model`` is a template whose ``k`` is replaced per row. Rows are sorted
    by k; a row without a stable equilibrium carries NaN and no class.
    """
    ks = sorted(float(k) for k in k_list)
    if not ks:
        raise ValueError("k_list is empty")
    if any(not (math.isfinite(k) and k > 0) for k in ks):
        raise ValueError(f"all k must be > 0, got {ks}")
    if len(set(ks)) != len(ks):
        raise ValueError("k_list has duplicate values")

    def solve(k):
        best = preferred_stable(find_equilibria_1d(model.with_k(k), beta_range, **solver_opts))
        if best is None:
            return SweepRow(k, math.nan, math.nan, None, False)
        return SweepRow(k, best.cfg.beta, best.u_total, best.classification,
                        best.within(beta_max))

    n = _workers(len(ks), workers)
    if n == 1:
        rows = [solve(k) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(solve, ks))
    return SweepResult(tuple(rows), beta_max)


def deflection(model: EnergyModel, k: float, beta_range=DEFAULT_RANGE, **solver_opts) -> float:
    """|beta*| of the preferred stable equilibrium, inf if there is none."""
    best = preferred_stable(find_equilibria_1d(model.with_k(k), beta_range, **solver_opts))
    return math.inf if best is None else abs(best.cfg.beta)


def critical_stiffness(
    model: EnergyModel,
    beta_tol: float,
    k_bracket=(0.1, 1000.0),
    beta_range=DEFAULT_RANGE,
    rel_width: float = 1e-6,
    **solver_opts,
) -> float:
    """Smallest k in ``k_bracket`` whose stable deflection is within ``beta_tol``.

    Returns the lower bracket edge when it already meets the bound. Raises
    :class:`BracketError` when the upper edge does not.
    """
    if not beta_tol > 0:
        raise ValueError(f"beta_tol must be > 0, got {beta_tol}")
    k_lo, k_hi = map(float, k_bracket)
    if not (0 < k_lo < k_hi and math.isfinite(k_hi)):
        raise ValueError(f"k_bracket must satisfy 0 < lo < hi, got {k_bracket}")
    defl = lambda k: deflection(model, k, beta_range, **solver_opts)
    if defl(k_lo) <= beta_tol:
        return k_lo
    d_hi = defl(k_hi)
    if d_hi > beta_tol:
        raise BracketError(
            f"deflection at k={k_hi:g} is {d_hi:.6g} rad > beta_tol={beta_tol:g}; "
            f"raise the upper bracket edge (try {10 * k_hi:g})"
        )
    while (k_hi - k_lo) > rel_width * k_hi:
        mid = 0.5 * (k_lo + k_hi)
        if defl(mid) <= beta_tol:
            k_hi = mid
        else:
            k_lo = mid
    return k_hi


def reduced_critical_stiffness(model: ReducedModel, beta_tol: float) -> float:
    """Closed form ``A / (C tan(beta_tol))`` for the reduced backend."""
    return abs(model.A) / (model.C * math.tan(beta_tol))
