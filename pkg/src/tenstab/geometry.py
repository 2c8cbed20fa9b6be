"""Kinematics of the three-spring tensegrity joint.

Two circular platforms are connected by a passive universal joint at the
origin A. The base sits below the joint (z = -base_offset), the moving
platform above it (z = +platform_offset in the home pose). Each platform
carries three spring attachments on a circle of radius ``r_f``.

Units: mm for lengths, rad for angles, N for the load ``w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EQUAL_SPACING = (math.pi / 2, 7 * math.pi / 6, 11 * math.pi / 6)


def _distinct_mod_2pi(angles, tol=1e-12):
    wrapped = [a % (2 * math.pi) for a in angles]
    for i in range(len(wrapped)):
        for j in range(i + 1, len(wrapped)):
            d = abs(wrapped[i] - wrapped[j])
            if min(d, 2 * math.pi - d) < tol:
                return False
    return True


@dataclass(frozen=True)
class TiltConfig:
    """Universal-joint angles: ``alpha`` about base x, then ``beta`` about the rotated y."""

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError(f"tilt angles must be finite, got ({self.alpha}, {self.beta})")

    def canonical(self) -> "TiltConfig":
        """Both angles wrapped into (-pi, pi]."""
        return TiltConfig(wrap_angle(self.alpha), wrap_angle(self.beta))

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])


def wrap_angle(x: float) -> float:
    y = math.remainder(x, 2 * math.pi)
    # remainder lands on -pi for odd multiples; the reporting range is (-pi, pi]
    return math.pi if y == -math.pi else y


@dataclass(frozen=True)
class MechanismGeometry:
    """Geometry and load of one tensegrity joint.

    Defaults are the preset used throughout the examples: r_f = 11 mm,
    h = 0.6, w = 4 N, equally spaced attachments and both offsets equal to
    ``r_f * h``. ``cg_lever`` = 2.2 mm is back-solved so that the gravity
    amplitude ``w * (r_f * h + cg_lever)`` is 35.2 N mm.
    """

    r_f: float = 11.0
    base_angles: tuple = EQUAL_SPACING
    platform_angles: tuple = EQUAL_SPACING
    platform_offset: float = 6.6
    base_offset: float = 6.6
    h: float = 0.6
    cg_lever: float = 2.2
    w: float = 4.0
    l_o: float = 0.0
    tension_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base_angles", tuple(float(a) for a in self.base_angles))
        object.__setattr__(self, "platform_angles", tuple(float(a) for a in self.platform_angles))
        for name in ("r_f", "platform_offset", "base_offset", "h", "cg_lever", "w", "l_o"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.r_f <= 0:
            raise ValueError(f"r_f must be > 0, got {self.r_f}")
        if self.w < 0:
            raise ValueError(f"w must be >= 0, got {self.w}")
        if self.l_o < 0:
            raise ValueError(f"l_o must be >= 0, got {self.l_o}")
        for name in ("base_angles", "platform_angles"):
            angles = getattr(self, name)
            if len(angles) != 3:
                raise ValueError(f"{name} needs exactly three angles")
            if not all(math.isfinite(a) for a in angles):
                raise ValueError(f"{name} must be finite")
            if not _distinct_mod_2pi(angles):
                raise ValueError(f"{name} must be pairwise distinct modulo 2*pi")
        if self.gravity_lever < 0:
            raise ValueError(
                f"gravity lever r_f*h + cg_lever must be >= 0, got {self.gravity_lever}"
            )

    @property
    def gravity_lever(self) -> float:
        """Lever arm ``r_f * h + cg_lever`` of the lumped weight, mm."""
        return self.r_f * self.h + self.cg_lever

    @property
    def gravity_amplitude(self) -> float:
        """``w * (r_f * h + cg_lever)``, N mm."""
        return self.w * self.gravity_lever

    def base_points(self) -> np.ndarray:
        """(3, 3) array, row i is B_i."""
        a = np.asarray(self.base_angles)
        return np.column_stack(
            [self.r_f * np.cos(a), self.r_f * np.sin(a), np.full(3, -self.base_offset)]
        )

    def platform_points_local(self) -> np.ndarray:
        """(3, 3) array of C_i in the platform frame (home pose)."""
        a = np.asarray(self.platform_angles)
        return np.column_stack(
            [self.r_f * np.cos(a), self.r_f * np.sin(a), np.full(3, self.platform_offset)]
        )


def _rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(b):
    c, s = math.cos(b), math.sin(b)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rx_d(a, order):
    # derivatives of R_x; order 1 and 2 only
    c, s = math.cos(a), math.sin(a)
    if order == 1:
        return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])
    return np.array([[0.0, 0.0, 0.0], [0.0, -c, s], [0.0, -s, -c]])


def _ry_d(b, order):
    c, s = math.cos(b), math.sin(b)
    if order == 1:
        return np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])
    return np.array([[-c, 0.0, -s], [0.0, 0.0, 0.0], [s, 0.0, -c]])


def joint_rotation(cfg: TiltConfig) -> np.ndarray:
    """Platform orientation ``R_x(alpha) @ R_y(beta)``."""
    return _rx(cfg.alpha) @ _ry(cfg.beta)


def joint_rotation_derivatives(cfg: TiltConfig):
    """First and second partials of the joint rotation.

    Returns ``(dR, d2R)`` where ``dR[j]`` is dR/dq_j and ``d2R[j][k]`` is
    d2R/dq_j dq_k for q = (alpha, beta).
    """
    rx, ry = _rx(cfg.alpha), _ry(cfg.beta)
    rx1, ry1 = _rx_d(cfg.alpha, 1), _ry_d(cfg.beta, 1)
    rx2, ry2 = _rx_d(cfg.alpha, 2), _ry_d(cfg.beta, 2)
    d_ab = rx1 @ ry1
    dR = (rx1 @ ry, rx @ ry1)
    d2R = ((rx2 @ ry, d_ab), (d_ab, rx @ ry2))
    return dR, d2R


def spring_endpoints(geom: MechanismGeometry, cfg: TiltConfig):
    """Attachment points of the three springs.

    Returns
    -------
    base, platform : ndarray, shape (3, 3)
        Row i holds B_i and C_i respectively, in the base frame at A.
    """
    R = joint_rotation(cfg)
    return geom.base_points(), geom.platform_points_local() @ R.T


def spring_lengths(geom: MechanismGeometry, cfg: TiltConfig) -> np.ndarray:
    base, plat = spring_endpoints(geom, cfg)
    return np.linalg.norm(plat - base, axis=1)
