"""Points, tangent vectors and conformal maps on the round three-sphere.

Arrays whose last axis has length 4 are treated as points of S^3 in the
ambient coordinates ``(x0, x1, x2, x3)``; the cap centre is ``e0``.  Every
function accepts either a :class:`SpherePoint` or a raw array, and the
vectorised paths operate over any number of leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

E0 = np.array([1.0, 0.0, 0.0, 0.0])
POLE_GUARD = 1e-9


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^3; the constructor renormalises its coordinates."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coords, dtype=float).reshape(4)
        n = np.linalg.norm(c)
        if not np.isfinite(n) or n == 0.0:
            raise DomainError("cannot normalise a zero or non-finite vector")
        object.__setattr__(self, "coords", c / n)

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    @property
    def x0(self) -> float:
        return float(self.coords[0])

    def project_tangent(self, v) -> "TangentVector":
        """Orthogonal projection of an ambient vector onto the tangent space."""
        v = np.asarray(v, dtype=float)
        return TangentVector(self, v - np.dot(v, self.coords) * self.coords)


@dataclass(frozen=True)
class TangentVector:
    """An ambient 4-vector tangent to S^3 at ``base``."""

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vec, dtype=float).reshape(4)
        if abs(np.dot(v, self.base.coords)) > 1e-12 * max(1.0, np.linalg.norm(v)):
            raise DomainError("vector is not tangent to the sphere at its base point")
        object.__setattr__(self, "vec", v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


@dataclass(frozen=True)
class CapParams:
    """Contact data of a capillary minimal surface in a geodesic ball.

    Attributes:
        R: Geodesic radius of the ball, in ``(0, pi)``.
        gamma: Contact angle in ``(0, pi/2]``.
        epsilon: Orientation sign, ``+1`` or ``-1``.
        kappa: Curvature ``sin(R)**2``; filled in when omitted.
    """

    R: float
    gamma: float
    epsilon: int = 1
    kappa: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.R < np.pi:
            raise DomainError(f"R={self.R} outside (0, pi)")
        if not 0.0 < self.gamma <= np.pi / 2 + 1e-12:
            raise DomainError(f"gamma={self.gamma} outside (0, pi/2]")
        if self.epsilon not in (1, -1):
            raise DomainError("epsilon must be +1 or -1")
        kappa = np.sin(self.R) ** 2
        if self.kappa is not None and abs(self.kappa - kappa) > 1e-14:
            raise DomainError("kappa must equal sin(R)^2")
        object.__setattr__(self, "gamma", min(float(self.gamma), np.pi / 2))
        object.__setattr__(self, "kappa", float(kappa))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "epsilon", int(self.epsilon))

    def to_dict(self) -> dict:
        return {"R": self.R, "gamma": self.gamma, "epsilon": self.epsilon, "kappa": self.kappa}


def _as_points(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def _wrap(x: np.ndarray):
    return SpherePoint(x) if x.ndim == 1 else x


def geodesic_distance(p, q) -> np.ndarray | float:
    """Great-circle distance ``arccos <p, q>`` with the inner product clamped."""
    ip = np.sum(_as_points(p) * _as_points(q), axis=-1)
    d = np.arccos(np.clip(ip, -1.0, 1.0))
    return float(d) if np.ndim(d) == 0 else d


def stereographic_inv(y):
    """Inverse stereographic projection from R^3 onto S^3 minus ``-e0``.

    Args:
        y: Array of shape ``(..., 3)``.

    Returns:
        A :class:`SpherePoint` for a single input, otherwise an array of
        shape ``(..., 4)``.
    """
    y = np.asarray(y, dtype=float)
    y2 = np.sum(y * y, axis=-1, keepdims=True)
    x = np.concatenate([(1.0 - y2), 2.0 * y], axis=-1) / (1.0 + y2)
    return _wrap(x)


def stereographic(p) -> np.ndarray:
    """Stereographic projection ``(x - x0 e0) / (1 + x0)`` from ``-e0``.

    Raises:
        PoleError: If any point has ``x0 <= -1 + 1e-9``.
    """
    x = _as_points(p)
    x0 = x[..., :1]
    if np.any(x0 <= -1.0 + POLE_GUARD):
        raise PoleError("point at the projection pole -e0")
    return x[..., 1:] / (1.0 + x0)


def stereographic_pushforward(p, v) -> np.ndarray:
    """Differential of :func:`stereographic` applied to tangent vectors.

    Uses ``v/(1+x0) - <v,e0>(x+e0)/(1+x0)^2``; the returned array keeps
    the four ambient components, the first of which vanishes.
    """
    x = _as_points(p)
    v = np.asarray(v, dtype=float)
    x0 = x[..., :1]
    if np.any(x0 <= -1.0 + POLE_GUARD):
        raise PoleError("point at the projection pole -e0")
    return v / (1.0 + x0) - v[..., :1] * (x + E0) / (1.0 + x0) ** 2


def dilation_factor(R: float) -> float:
    """Euclidean scale taking the image of ``B_R`` onto the unit ball."""
    if not 0.0 < R < np.pi:
        raise DomainError(f"R={R} outside (0, pi)")
    return 1.0 / np.tan(R / 2.0)


def conformal_dilation(R: float, p):
    """Conformal dilation of S^3 fixing ``e0`` and sending ``dB_R`` to the equator."""
    lam = dilation_factor(R)
    return stereographic_inv(lam * stereographic(p))


def _translation_parts(y, rbar, x):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(y) >= rbar:
        raise DomainError("|y| must be smaller than rbar")
    r2 = rbar * rbar
    xy = np.sum(x * y, axis=-1, keepdims=True)
    xx = np.sum(x * x, axis=-1, keepdims=True)
    yy = float(np.dot(y, y))
    den = r2 * r2 + 2.0 * r2 * xy + xx * yy
    return y, x, r2, xy, xx, yy, den


def conformal_translation(y, rbar: float, x) -> np.ndarray:
    """Conformal automorphism of the ball of radius ``rbar`` sending 0 to ``y``.

    Args:
        y: Image of the origin, ``|y| < rbar``.
        rbar: Ball radius.
        x: Points of shape ``(..., 3)`` in the closed ball.

    Raises:
        DomainError: If ``|y| >= rbar``.
    """
    y, x, r2, xy, xx, yy, den = _translation_parts(y, rbar, x)
    return r2 * ((r2 + 2.0 * xy + xx) * y + (r2 - yy) * x) / den


def translation_norm_sq(y, rbar: float, x) -> np.ndarray:
    """Closed form of ``|conformal_translation(y, rbar, x)|^2``."""
    y, x, r2, xy, xx, yy, den = _translation_parts(y, rbar, x)
    xpy = np.sum((x + y) ** 2, axis=-1, keepdims=True)
    return (r2 * r2 * xpy / den)[..., 0]


def translation_conformal_factor(y, rbar: float, x) -> np.ndarray:
    """Pullback factor: ``Phi_y^* delta = factor * delta``."""
    y, x, r2, xy, xx, yy, den = _translation_parts(y, rbar, x)
    return ((r2 * (r2 - yy) / den) ** 2)[..., 0]


def cap_weight(R: float, rho, n: int = 2):
    """Conformal weight ``h_R`` and density ``f_R = -n log h_R`` of the cap model.

    Returns:
        Tuple ``(h, f)`` broadcast over ``rho``.

    Raises:
        DomainError: If ``1 + cos R cos rho <= 0``.
    """
    base = 1.0 + np.cos(R) * np.cos(rho)
    if np.any(base <= 0.0):
        raise DomainError("1 + cos R cos rho must be positive")
    return 1.0 / base, n * np.log(base)


def ct_coefficient(kappa: float, R: float) -> float:
    """Geodesic curvature of a sphere of radius ``R`` in the space form of curvature ``kappa``."""
    if R <= 0:
        raise DomainError("R must be positive")
    if kappa > 0:
        a = R * np.sqrt(kappa)
        if a >= np.pi or abs(np.sin(a)) < 1e-14:
            raise DomainError("R*sqrt(kappa) must lie in (0, pi)")
        return float(np.sqrt(kappa) / np.tan(a))
    if kappa == 0:
        return 1.0 / R
    a = R * np.sqrt(-kappa)
    return float(np.sqrt(-kappa) / np.tanh(a))
