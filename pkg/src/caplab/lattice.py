"""Finite-difference differential geometry on ``(t, s)`` lattices.

A lattice surface is sampled on a uniform grid in ``t`` (non-periodic,
boundary rows included) and a uniform periodic grid in ``s``.  Derivatives
in ``t`` use central differences of order 2 or 4 with one-sided stencils of
the same order near the boundary rows; derivatives in ``s`` are spectral.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError


def d_t(F: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """First ``t``-derivative along axis 0 with the given order everywhere."""
    if order == 4:
        return _d_t4(F, h)
    D = np.empty_like(F)
    D[1:-1] = (F[2:] - F[:-2]) / (2 * h)
    D[0] = (-3 * F[0] + 4 * F[1] - F[2]) / (2 * h)
    D[-1] = (3 * F[-1] - 4 * F[-2] + F[-3]) / (2 * h)
    return D


def d_tt(F: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """Second ``t``-derivative along axis 0 with the given order everywhere."""
    if order == 4:
        return _d_tt4(F, h)
    D = np.empty_like(F)
    D[1:-1] = (F[2:] - 2 * F[1:-1] + F[:-2]) / (h * h)
    D[0] = (2 * F[0] - 5 * F[1] + 4 * F[2] - F[3]) / (h * h)
    D[-1] = (2 * F[-1] - 5 * F[-2] + 4 * F[-3] - F[-4]) / (h * h)
    return D


def _d_t4(F, h):
    D = np.empty_like(F)
    D[2:-2] = (-F[4:] + 8 * F[3:-1] - 8 * F[1:-3] + F[:-4]) / (12 * h)
    for i, sgn, G in ((0, 1, F), (-1, -1, F[::-1])):
        D[i] = sgn * (-25 * G[0] + 48 * G[1] - 36 * G[2] + 16 * G[3] - 3 * G[4]) / (12 * h)
    for i, sgn, G in ((1, 1, F), (-2, -1, F[::-1])):
        D[i] = sgn * (-3 * G[0] - 10 * G[1] + 18 * G[2] - 6 * G[3] + G[4]) / (12 * h)
    return D


def _d_tt4(F, h):
    D = np.empty_like(F)
    D[2:-2] = (-F[4:] + 16 * F[3:-1] - 30 * F[2:-2] + 16 * F[1:-3] - F[:-4]) / (12 * h * h)
    for i, G in ((0, F), (-1, F[::-1])):
        D[i] = (45 * G[0] - 154 * G[1] + 214 * G[2] - 156 * G[3] + 61 * G[4] - 10 * G[5]) / (
            12 * h * h
        )
    for i, G in ((1, F), (-2, F[::-1])):
        D[i] = (10 * G[0] - 15 * G[1] - 4 * G[2] + 14 * G[3] - 6 * G[4] + G[5]) / (12 * h * h)
    return D


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def d_s(F: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral ``s``-derivative along axis 1 for a ``2 pi``-periodic grid."""
    n = F.shape[1]
    k = _wavenumbers(n)
    if order % 2 == 1 and n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * F.ndim
    shape[1] = n
    mult = ((1j * k) ** order).reshape(shape)
    return np.real(np.fft.ifft(np.fft.fft(F, axis=1) * mult, axis=1))


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Generalised cross product in R^4: the vector ``n`` with ``<n, v> = det(v, a, b, c)``."""
    M = np.stack([a, b, c], axis=-2)
    out = np.empty(a.shape)
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[..., i] = (-1) ** i * np.linalg.det(M[..., cols])
    return out


@dataclass(frozen=True)
class LatticeSurface:
    """Surface sampled on a ``(t, s)`` lattice with geometry from finite differences.

    Attributes:
        t: Uniform ``t`` nodes including both boundary rows.
        s: Uniform periodic ``s`` nodes on ``[0, 2 pi)``.
        points: Array of shape ``(n_t, n_s, d)``; ``d = 4`` for surfaces in
            S^3 and ``d = 3`` for Euclidean surfaces.
        ref_normal: Optional array used only to fix the orientation.
        order: Order (2 or 4) of the ``t`` difference stencils.
    """

    t: np.ndarray
    s: np.ndarray
    points: np.ndarray
    ref_normal: np.ndarray | None = None
    order: int = 2

    def __post_init__(self) -> None:
        if self.points.shape[:2] != (self.t.size, self.s.size):
            raise DomainError("points must have shape (n_t, n_s, d)")
        if self.t.size < 6:
            raise DomainError("need at least six t rows")
        if self.order not in (2, 4):
            raise DomainError("finite-difference order must be 2 or 4")

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def sphere(self) -> bool:
        return self.points.shape[-1] == 4

    def dt(self, F):
        return d_t(F, self.h, self.order)

    def dtt(self, F):
        return d_tt(F, self.h, self.order)

    @cached_property
    def X_t(self):
        return self.dt(self.points)

    @cached_property
    def X_s(self):
        return d_s(self.points)

    @cached_property
    def X_tt(self):
        return self.dtt(self.points)

    @cached_property
    def X_ss(self):
        return d_s(self.points, 2)

    @cached_property
    def X_ts(self):
        return d_s(self.X_t)

    @cached_property
    def g(self):
        """Metric components ``(g_tt, g_ts, g_ss)``."""
        ip = lambda a, b: np.sum(a * b, axis=-1)
        return ip(self.X_t, self.X_t), ip(self.X_t, self.X_s), ip(self.X_s, self.X_s)

    @cached_property
    def det_g(self):
        gtt, gts, gss = self.g
        return gtt * gss - gts * gts

    @cached_property
    def g_inv(self):
        gtt, gts, gss = self.g
        d = self.det_g
        return gss / d, -gts / d, gtt / d

    @cached_property
    def normal(self):
        if self.sphere:
            n = cross4(self.points, self.X_t, self.X_s)
        else:
            n = np.cross(self.X_t, self.X_s)
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        if self.ref_normal is not None:
            flip = np.sum(n * self.ref_normal, axis=-1, keepdims=True) < 0
            n = np.where(flip, -n, n)
        return n

    @cached_property
    def A(self):
        """Second fundamental form ``A_ij = -<nu, X_ij>`` as ``(A_tt, A_ts, A_ss)``."""
        ip = lambda a: -np.sum(self.normal * a, axis=-1)
        return ip(self.X_tt), ip(self.X_ts), ip(self.X_ss)

    @cached_property
    def H(self):
        """Mean curvature ``g^ij A_ij``."""
        itt, its, iss = self.g_inv
        att, ats, ass = self.A
        return itt * att + 2 * its * ats + iss * ass

    @cached_property
    def A_norm_sq(self):
        itt, its, iss = self.g_inv
        att, ats, ass = self.A
        return (
            (itt * att + its * ats) ** 2
            + 2 * (itt * ats + its * ass) * (its * att + iss * ats)
            + (its * ats + iss * ass) ** 2
        )

    def gradient_pairing(self, u, v):
        """``g(grad u, grad v)`` for lattice scalars."""
        itt, its, iss = self.g_inv
        ut, us, vt, vs = self.dt(u), d_s(u), self.dt(v), d_s(v)
        return itt * ut * vt + its * (ut * vs + us * vt) + iss * us * vs

    @cached_property
    def christoffel_trace(self):
        """``g^ij Gamma^k_ij`` for ``k = t, s`` from tangential parts of ``X_ij``."""
        itt, its, iss = self.g_inv
        ip = lambda a, b: np.sum(a * b, axis=-1)
        # Contracted second derivative g^ij X_ij projected on the tangents.
        trace = (
            itt[..., None] * self.X_tt + 2 * its[..., None] * self.X_ts + iss[..., None] * self.X_ss
        )
        ct, cs = ip(trace, self.X_t), ip(trace, self.X_s)
        return itt * ct + its * cs, its * ct + iss * cs

    def laplacian(self, u):
        """Laplace-Beltrami operator ``g^ij (u_ij - Gamma^k_ij u_k)``.

        Every term is a pointwise product of first and second differences,
        so the scheme keeps its order on the rows next to the boundary.
        """
        itt, its, iss = self.g_inv
        gt, gs = self.christoffel_trace
        ut, us = self.dt(u), d_s(u)
        u_tt, u_ss, u_ts = self.dtt(u), d_s(u, 2), d_s(self.dt(u))
        return itt * u_tt + 2 * its * u_ts + iss * u_ss - gt * ut - gs * us

    def conormal_derivative(self, u):
        """Outward conormal derivative of ``u`` on the two boundary rows.

        Returns:
            Tuple ``(minus_row, plus_row)`` of arrays over ``s``.
        """
        itt, its, _ = self.g_inv
        du = (itt * self.dt(u) + its * d_s(u)) / np.sqrt(itt)
        return -du[0], du[-1]

    def conormal(self):
        """Outward unit conormal vectors on ``(minus_row, plus_row)``."""
        itt, its, _ = self.g_inv
        v = (itt[..., None] * self.X_t + its[..., None] * self.X_s) / np.sqrt(itt)[..., None]
        return -v[0], v[-1]

    def integrate(self, F):
        """Surface integral with trapezoid weights in ``t`` and uniform weights in ``s``."""
        w = np.full(self.t.size, self.h)
        w[0] = w[-1] = self.h / 2
        ds = 2 * np.pi / self.s.size
        return float(np.sum(w[:, None] * F * np.sqrt(self.det_g)) * ds)
