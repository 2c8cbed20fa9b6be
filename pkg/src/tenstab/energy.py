"""Total potential energy of the loaded joint and its derivatives.

Two backends share one interface:

* :class:`GeometricModel` evaluates spring + gravity energy from a
  :class:`~tenstab.geometry.MechanismGeometry`, with exact first and second
  derivatives in (alpha, beta).
* :class:`ReducedModel` is the closed form ``A sin(beta) + B k - C k cos(beta)``.

Energies are in N mm, stiffness in N/mm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .geometry import (
    MechanismGeometry,
    TiltConfig,
    joint_rotation,
    joint_rotation_derivatives,
)


class DegenerateFitError(ValueError):
    """Raised when the fit basis is rank deficient for the given samples."""


def _check_k(k):
    if not (math.isfinite(k) and k > 0):
        raise ValueError(f"k must be > 0, got {k}")


@dataclass(frozen=True)
class GeometricModel:
    geom: MechanismGeometry
    k: float

    def __post_init__(self):
        _check_k(self.k)

    def with_k(self, k: float) -> "GeometricModel":
        return replace(self, k=k)


@dataclass(frozen=True)
class ReducedModel:
    A: float
    B: float
    C: float
    k: float

    def __post_init__(self):
        for name in ("A", "B", "C"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        _check_k(self.k)

    def with_k(self, k: float) -> "ReducedModel":
        return replace(self, k=k)


EnergyModel = Union[GeometricModel, ReducedModel]

#: (A, B, C) of the reference inspection-robot joint, N mm and mm^2.
REFERENCE_COEFFICIENTS = (35.2, 312.8, 50.82)


def reference_reduced_model(k: float) -> ReducedModel:
    return ReducedModel(*REFERENCE_COEFFICIENTS, k=k)


@dataclass(frozen=True)
class EnergyEval:
    u_spring: float
    u_gravity: float
    u_total: float
    grad: np.ndarray
    hessian: np.ndarray


def _spring_terms(geom: MechanismGeometry, cfg: TiltConfig):
    """Sum over springs of 0.5*(l - l_o)^2 with gradient and Hessian (k excluded)."""
    R = joint_rotation(cfg)
    dR, d2R = joint_rotation_derivatives(cfg)
    base = geom.base_points()
    local = geom.platform_points_local()
    l_o = geom.l_o

    energy = 0.0
    grad = np.zeros(2)
    hess = np.zeros((2, 2))
    for P, Bp in zip(local, base):
        d = R @ P - Bp
        J = np.column_stack([dR[0] @ P, dR[1] @ P])
        curv = np.array([[d @ (d2R[a][b] @ P) for b in range(2)] for a in range(2)])
        JtJ = J.T @ J
        Jtd = J.T @ d
        if l_o == 0.0:
            energy += 0.5 * (d @ d)
            grad += Jtd
            hess += JtJ + curv
            continue
        length = math.sqrt(d @ d)
        stretch = length - l_o
        if geom.tension_only and stretch <= 0.0:
            continue
        energy += 0.5 * stretch * stretch
        if length == 0.0:
            # cone point of |d|; derivatives undefined, treat as flat
            continue
        ratio = 1.0 - l_o / length
        grad += ratio * Jtd
        hess += ratio * (JtJ + curv) + (l_o / length**3) * np.outer(Jtd, Jtd)
    return energy, grad, hess


def spring_energy(model: EnergyModel, cfg: TiltConfig) -> float:
    """``0.5 k sum (l_i - l_o)^2`` or ``k (B - C cos beta)``."""
    if isinstance(model, ReducedModel):
        return model.k * (model.B - model.C * math.cos(cfg.beta))
    return float(model.k * _spring_terms(model.geom, cfg)[0])


def gravity_energy(model: EnergyModel, cfg: TiltConfig) -> float:
    """Potential of the lumped weight.

    For the geometric backend the weight sits on the platform axis at the
    gravity lever, and its height is the lever times the x-component of the
    rotated axis, which is ``sin(beta)`` for the R_x(alpha) R_y(beta) joint.
    """
    if isinstance(model, ReducedModel):
        return model.A * math.sin(cfg.beta)
    return model.geom.gravity_amplitude * math.sin(cfg.beta)


def total_energy(model: EnergyModel, cfg: TiltConfig) -> EnergyEval:
    sb, cb = math.sin(cfg.beta), math.cos(cfg.beta)
    if isinstance(model, ReducedModel):
        A, Ck = model.A, model.C * model.k
        u_s = model.k * model.B - Ck * cb
        u_g = A * sb
        grad = np.array([0.0, A * cb + Ck * sb])
        hess = np.array([[0.0, 0.0], [0.0, -A * sb + Ck * cb]])
    else:
        e, g, H = _spring_terms(model.geom, cfg)
        amp = model.geom.gravity_amplitude
        u_s = model.k * e
        u_g = amp * sb
        grad = model.k * g + np.array([0.0, amp * cb])
        hess = model.k * H + np.array([[0.0, 0.0], [0.0, -amp * sb]])
        hess = 0.5 * (hess + hess.T)
    u_s, u_g = float(u_s), float(u_g)
    return EnergyEval(u_s, u_g, u_s + u_g, grad, hess)


def fd_gradient(model: EnergyModel, cfg: TiltConfig, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of the total energy."""
    if not 0 < step < 1e-2:
        raise ValueError(f"step must lie in (0, 1e-2), got {step}")
    a, b = cfg.alpha, cfg.beta
    u = lambda x, y: total_energy(model, TiltConfig(x, y)).u_total
    return np.array([
        (u(a + step, b) - u(a - step, b)) / (2 * step),
        (u(a, b + step) - u(a, b - step)) / (2 * step),
    ])


def fd_hessian(model: EnergyModel, cfg: TiltConfig, step: float = 1e-5) -> np.ndarray:
    """Central differences of the analytic gradient."""
    if not 0 < step < 1e-2:
        raise ValueError(f"step must lie in (0, 1e-2), got {step}")
    a, b = cfg.alpha, cfg.beta
    g = lambda x, y: total_energy(model, TiltConfig(x, y)).grad
    cols = [
        (g(a + step, b) - g(a - step, b)) / (2 * step),
        (g(a, b + step) - g(a, b - step)) / (2 * step),
    ]
    return np.column_stack(cols)


@dataclass(frozen=True)
class ReducedFit:
    A: float
    B: float
    C: float
    residual: float

    def as_model(self, k: float) -> ReducedModel:
        return ReducedModel(self.A, self.B, self.C, k)


def fit_reduced_samples(betas, energies, k: float, rcond: float = 1e-10) -> ReducedFit:
    """Least-squares fit of ``U = A sin b + B k - C k cos b`` to sampled energies.

    ``residual`` is the largest absolute misfit over the samples.
    """
    _check_k(k)
    betas = np.asarray(betas, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if betas.shape != energies.shape or betas.ndim != 1:
        raise ValueError("betas and energies must be 1-D arrays of equal length")
    if betas.size < 3:
        raise DegenerateFitError(f"need at least 3 samples, got {betas.size}")
    X = np.column_stack([np.sin(betas), np.full_like(betas, k), -k * np.cos(betas)])
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] <= rcond * sv[0]:
        raise DegenerateFitError(
            "sample angles do not separate {sin b, k, k cos b}; "
            f"singular values {sv.tolist()}"
        )
    coef, *_ = np.linalg.lstsq(X, energies, rcond=None)
    residual = float(np.max(np.abs(X @ coef - energies)))
    return ReducedFit(float(coef[0]), float(coef[1]), float(coef[2]), residual)


def fit_reduced_coefficients(model: EnergyModel, samples) -> ReducedFit:
    """Fit the reduced closed form to ``model`` sampled along alpha = 0."""
    samples = np.asarray(samples, dtype=float)
    energies = [total_energy(model, TiltConfig(0.0, float(b))).u_total for b in samples]
    return fit_reduced_samples(samples, energies, model.k)
