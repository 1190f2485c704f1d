"""Radial conformal models, warped-product curvature conditions and related identities.

A radial conformal model is a ball ``(B_rbar, e^{2 phi(r)} delta)`` in
``R^{n+1}``.  This module evaluates the curvature condition on ``phi``, the
test functions ``u_a = e^phi x_a`` along rotational annuli pushed into the
stereographic model of S^3, the mean-curvature derivative of the conformal
translation foliation, and the Killing orthogonality integral on normal
graphs over the half-Clifford annulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, SignMismatch
from .lattice import LatticeSurface
from .rotational import CLIFFORD_R0, find_free_boundary, integrate_profile
from .spectral import killing_field
from .sphere import cap_weight, conformal_translation, stereographic, translation_conformal_factor
from .surface import NeumannField, RotationalAnnulus, build_annulus, normal_graph

ZERO_TOL = 1e-10

Scalar = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WarpedProfile:
    """Radial conformal factor ``phi(r)`` with its first two derivatives.

    Attributes:
        phi: ``phi(r)``.
        dphi: ``phi'(r)``.
        d2phi: ``phi''(r)``.
        rbar: Outer radius of the model ball.
        label: One of ``SpaceForm``, ``Gaussian`` or ``Custom``.
        n: Hypersurface dimension; the ambient ball lives in ``R^{n+1}``.
    """

    phi: Scalar
    dphi: Scalar
    d2phi: Scalar
    rbar: float
    label: str = "Custom"
    n: int = 2

    def grid(self, nodes: int = 200) -> np.ndarray:
        """Uniform nodes on ``(0, rbar]`` excluding the origin."""
        return self.rbar * np.arange(1, nodes + 1) / nodes

    def samples(self, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        r = np.asarray(r, dtype=float)
        vals = self.phi(r), self.dphi(r), self.d2phi(r)
        vals = tuple(np.broadcast_to(v, r.shape).astype(float) for v in vals)
        if not all(np.all(np.isfinite(v)) for v in vals):
            raise DomainError("profile is not finite on the grid")
        return vals

    def check_origin(self, nodes: int = 200) -> float:
        """``phi'(r)/r`` at the smallest grid node; must be finite."""
        r = self.grid(nodes)[0]
        q = float(self.dphi(np.array(r)) / r)
        if not np.isfinite(q):
            raise DomainError("phi'/r is unbounded near the origin")
        return q

    @classmethod
    def space_form(cls, kappa: float = 1.0, rbar: float = 1.0, n: int = 2) -> "WarpedProfile":
        """``phi = log(2 / (1 + kappa r^2))``; ``kappa = 0`` gives the flat metric."""
        if kappa < 0 and rbar >= 1.0 / np.sqrt(-kappa):
            raise DomainError("hyperbolic model needs rbar < 1/sqrt(-kappa)")
        if kappa == 0:
            z = lambda r: np.zeros_like(np.asarray(r, float))
            return cls(z, z, z, rbar, "SpaceForm", n)
        return cls(
            lambda r: np.log(2.0 / (1.0 + kappa * np.asarray(r) ** 2)),
            lambda r: -2.0 * kappa * np.asarray(r) / (1.0 + kappa * np.asarray(r) ** 2),
            lambda r: -2.0 * kappa * (1.0 - kappa * np.asarray(r) ** 2)
            / (1.0 + kappa * np.asarray(r) ** 2) ** 2,
            rbar,
            "SpaceForm",
            n,
        )

    @classmethod
    def gaussian(cls, n: int = 2, rbar: float = 1.0) -> "WarpedProfile":
        """Gaussian density ``phi = -r^2 / (4n)``."""
        c = 1.0 / (4.0 * n)
        return cls(
            lambda r: -c * np.asarray(r) ** 2,
            lambda r: -2.0 * c * np.asarray(r),
            lambda r: np.full_like(np.asarray(r, float), -2.0 * c),
            rbar,
            "Gaussian",
            n,
        )

    @classmethod
    def polynomial(cls, coeffs, rbar: float = 1.0, n: int = 2) -> "WarpedProfile":
        """``phi = sum_k coeffs[k] r^k``; the linear coefficient must vanish."""
        p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
        if p.coef.size > 1 and p.coef[1] != 0.0:
            raise DomainError("a linear term makes phi'/r unbounded at the origin")
        d1, d2 = p.deriv(1), p.deriv(2)
        return cls(p, d1, d2, rbar, "Custom", n)


def random_profile(rng: np.random.Generator, degree: int = 4, scale: float = 0.5) -> WarpedProfile:
    """Random even-start polynomial profile with no linear term."""
    coeffs = np.zeros(degree + 1)
    coeffs[2:] = scale * rng.standard_normal(degree - 1)
    return WarpedProfile.polynomial(coeffs)


@dataclass
class ConditionReport:
    """Pointwise values of ``(phi'/r)' - r (phi'/r)^2`` with a verdict."""

    r: np.ndarray
    values: np.ndarray
    verdict: str


def _condition_values(profile: WarpedProfile, r: np.ndarray) -> np.ndarray:
    _, d1, d2 = profile.samples(r)
    q = d1 / r
    dq = d2 / r - d1 / r**2
    return dq - r * q * q


def _verdict(values: np.ndarray, tol: float) -> str:
    if np.all(np.abs(values) <= tol):
        return "IdenticallyZero"
    if np.all(values < 0):
        return "StrictlyNegative"
    return "Mixed"


def condition_A_eval(profile: WarpedProfile, nodes: int = 200, tol: float = ZERO_TOL) -> ConditionReport:
    """Evaluate the radial curvature condition on the profile grid.

    The verdict is ``IdenticallyZero`` when every value is within ``tol``
    of zero, ``StrictlyNegative`` when every value is negative and
    ``Mixed`` otherwise.
    """
    r = profile.grid(nodes)
    profile.check_origin(nodes)
    v = _condition_values(profile, r)
    return ConditionReport(r, v, _verdict(v, tol))


@dataclass
class RicciGap:
    """Unit-normalised radial and tangential Ricci curvatures of the model."""

    r: np.ndarray
    radial: np.ndarray
    tangential: np.ndarray
    gap: np.ndarray
    condition: np.ndarray


def ricci_components(profile: WarpedProfile, r) -> tuple[np.ndarray, np.ndarray]:
    """Ricci curvature of ``e^{2 phi} delta`` on unit radial and tangential vectors."""
    m = profile.n + 1
    r = np.asarray(r, dtype=float)
    phi, d1, d2 = profile.samples(r)
    scale = np.exp(-2 * phi)
    radial = -(m - 1) * (d2 + d1 / r) * scale
    tangential = -(d2 + (2 * m - 3) * d1 / r + (m - 2) * d1 * d1) * scale
    return radial, tangential


def ricci_radial_gap(profile: WarpedProfile, nodes: int = 200, tol: float = ZERO_TOL) -> RicciGap:
    """Radial minus tangential Ricci curvature, checked against the condition sign.

    Raises:
        DomainError: If the ambient dimension is below 3 (the gap vanishes).
        SignMismatch: If the gap and ``-condition`` disagree in sign at a node
            where either exceeds ``tol`` in magnitude.
    """
    if profile.n < 2:
        raise DomainError("the radial gap needs ambient dimension at least 3")
    r = profile.grid(nodes)
    radial, tangential = ricci_components(profile, r)
    gap = radial - tangential
    cond = _condition_values(profile, r)
    a = np.where(np.abs(gap) <= tol, 0, np.sign(gap))
    b = np.where(np.abs(cond) <= tol, 0, -np.sign(cond))
    if np.any(a != b):
        i = int(np.argmax(a != b))
        raise SignMismatch(f"gap {gap[i]:.3e} vs condition {cond[i]:.3e} at r={r[i]:.4f}")
    return RicciGap(r, radial, tangential, gap, cond)


# u_a identities in the stereographic model of S^3.

@dataclass
class ModelSurface:
    """A surface lattice inside the conformal model ball.

    Attributes:
        lattice: Euclidean lattice (points in ``R^3``).
        R: Geodesic radius of the barrier sphere in the round metric.
        boundary_rows: Rows lying on the barrier sphere.
    """

    lattice: LatticeSurface
    R: float
    boundary_rows: tuple = (0, -1)


def sphere_model_profile() -> WarpedProfile:
    """Stereographic model of the round unit sphere."""
    return WarpedProfile.space_form(1.0, rbar=np.inf)


def push_to_model(surface: RotationalAnnulus, order: int = 4) -> ModelSurface:
    """Stereographic image of a free-boundary annulus in S^3.

    Raises:
        DomainError: If the annulus is not free-boundary.
        PoleError: If the surface meets ``-e0``.
    """
    if surface.ambient != "sphere":
        raise DomainError("the stereographic model needs a surface in S^3")
    if abs(surface.gamma - np.pi / 2) > 1e-8:
        raise DomainError("the Robin relation for u_a needs contact angle pi/2")
    y = stereographic(surface.points)
    return ModelSurface(LatticeSurface(surface.t, surface.s, y, order=order), surface.R)


def equatorial_disc(a, R: float, n_t: int = 128, n_s: int = 32, inner: float = 0.25) -> ModelSurface:
    """Annular piece of the plane ``x_a = 0`` between radii ``inner * r_R`` and ``r_R``."""
    a = np.asarray(a, dtype=float)
    a = a / np.linalg.norm(a)
    b = np.cross(a, [1.0, 0.0, 0.0])
    if np.linalg.norm(b) < 1e-6:
        b = np.cross(a, [0.0, 1.0, 0.0])
    b /= np.linalg.norm(b)
    c = np.cross(a, b)
    rR = np.tan(R / 2)
    t = np.linspace(inner * rR, rR, n_t)
    s = 2 * np.pi * np.arange(n_s) / n_s
    T, S = np.meshgrid(t, s, indexing="ij")
    pts = T[..., None] * (np.cos(S)[..., None] * b + np.sin(S)[..., None] * c)
    # x_a vanishes to roundoff; pin it so that u_a is exactly zero.
    pts -= np.sum(pts * a, axis=-1, keepdims=True) * a
    return ModelSurface(LatticeSurface(t, s, pts), R, (-1,))


def barrier_curvature(profile: WarpedProfile, rR: float) -> float:
    """Umbilicity factor ``kappa`` of the centred sphere of Euclidean radius ``rR``."""
    phi, d1, _ = profile.samples(np.array(rR))
    return float(np.exp(-phi) * (1.0 / rR + d1))


@dataclass
class UaResiduals:
    """Sup-norm residuals of the interior and boundary ``u_a`` identities."""

    interior: float
    boundary: float

    @property
    def max(self) -> float:
        return max(self.interior, self.boundary)


def ua_identity_check(surface, a, profile: WarpedProfile | None = None, order: int = 4) -> UaResiduals:
    """Residuals of the ``u_a`` identities on a minimal surface in the model.

    The interior residual compares ``(Delta + |A|^2 + Ric(nu, nu)) u_a``
    with ``-n e^{-2 phi}(phi'' - phi'/r - phi'^2) <nu_delta, d_r>^2 u_a
    + |A|^2 u_a``, all in the metric ``e^{2 phi} delta``; the boundary
    residual compares the conormal derivative with ``kappa u_a``.

    Args:
        surface: A :class:`RotationalAnnulus` in S^3 (pushed stereographically)
            or a :class:`ModelSurface`.
        a: Direction in the model ``R^3``.
        profile: Conformal factor; defaults to the stereographic sphere.
        order: Order of the ``t`` stencils.
    """
    if profile is None:
        profile = sphere_model_profile()
    model = push_to_model(surface, order) if isinstance(surface, RotationalAnnulus) else surface
    lat = model.lattice
    a = np.asarray(a, dtype=float)
    a = a / np.linalg.norm(a)
    y = lat.points
    r = np.linalg.norm(y, axis=-1)
    phi, d1, d2 = profile.samples(r)
    n = profile.n
    u = np.exp(phi) * (y @ a)
    p = np.sum(lat.normal * y, axis=-1) / r  # <nu_delta, d_r>
    psi = d1 * p
    e2 = np.exp(-2 * phi)
    # Conformal change on a surface: the Laplacian scales by e^{-2 phi}.
    lap = e2 * lat.laplacian(u)
    A2 = e2 * (lat.A_norm_sq + 2 * psi * lat.H + n * psi**2)
    rad, tan = ricci_components(profile, r)
    ric = rad * p**2 + tan * (1 - p**2)
    lhs = lap + (A2 + ric) * u
    rhs = -n * e2 * (d2 - d1 / r - d1 * d1) * p**2 * u + A2 * u
    interior = float(np.abs(lhs - rhs)[1:-1].max())
    kappa = barrier_curvature(profile, float(np.tan(model.R / 2)))
    minus, plus = lat.conormal_derivative(u)
    bd = 0.0
    for row in model.boundary_rows:
        du = minus if row == 0 else plus
        res = np.exp(-phi[row]) * du - kappa * u[row]
        bd = max(bd, float(np.abs(res).max()))
    return UaResiduals(interior, bd)


# Conformal translation foliation.

def _foliation_t(rbar, s, r):
    return rbar**2 * np.sqrt((r * r + s * s) / (rbar**4 + s * s * r * r))


def _check_foliation_domain(rbar, s, r):
    s, r = np.asarray(s, float), np.asarray(r, float)
    if not np.isfinite(rbar) or rbar <= 0:
        raise DomainError("rbar must be positive and finite")
    if np.any(s <= 0) or np.any(s >= rbar) or np.any(r < 0) or np.any(r > rbar):
        raise DomainError("need 0 < s < rbar and 0 <= r <= rbar")
    return s, r


def foliation_derivative(rbar: float, phi: WarpedProfile, s, r, check_sign: bool = True):
    """Normal derivative of the pulled-back log factor on the equatorial disc.

    Evaluates ``2 s t^2 / (rbar^2 (r^2 + s^2)) (-1 + phi'(t)/t (rbar^2 - t^2)/2)``
    with ``t = rbar^2 sqrt((r^2 + s^2) / (rbar^4 + s^2 r^2))``.

    Raises:
        DomainError: Outside ``0 < s < rbar``, ``0 <= r <= rbar``.
        SignMismatch: If a value is non-negative although the profile
            passes the curvature condition.
    """
    s, r = _check_foliation_domain(rbar, s, r)
    t = _foliation_t(rbar, s, r)
    _, d1, _ = phi.samples(t)
    val = 2 * s * t * t / (rbar**2 * (r * r + s * s)) * (-1 + d1 / t * (rbar**2 - t * t) / 2)
    if check_sign and condition_A_eval(phi).verdict != "Mixed" and np.any(val >= 0):
        raise SignMismatch("foliation is not strictly mean convex")
    return float(val) if val.ndim == 0 else val


def foliation_derivative_fd(rbar: float, phi: WarpedProfile, s: float, r: float, h: float = 1e-5) -> float:
    """Central difference of ``u_s(x) = phi(|Phi_s x|) + log(conformal factor)`` in ``x0``.

    The point ``x = (0, r, 0)`` lies on the equatorial disc; ``Phi_s`` is
    the conformal translation sending the origin to ``s e0``.
    """
    _check_foliation_domain(rbar, s, r)
    y = np.array([s, 0.0, 0.0])
    x = np.array([[h, r, 0.0], [-h, r, 0.0]])
    img = conformal_translation(y, rbar, x)
    u = phi.samples(np.linalg.norm(img, axis=-1))[0] + 0.5 * np.log(
        translation_conformal_factor(y, rbar, x)
    )
    return float((u[0] - u[1]) / (2 * h))


# Killing orthogonality on normal graphs.

def half_clifford(n_t: int = 256, n_s: int = 32) -> RotationalAnnulus:
    """Clifford annulus truncated at the equator ``x0 = 0``."""
    prof = integrate_profile(CLIFFORD_R0, t_max=2.0)
    return build_annulus(prof, find_free_boundary(prof), n_t, n_s)


def weighted_mean_curvature(lat: LatticeSurface, R: float) -> np.ndarray:
    """``H_f = H - <grad f, nu>`` for ``f = 2 log(1 + cos R cos rho)``."""
    x0 = lat.points[..., 0]
    cR = np.cos(R)
    # grad f = f'(rho) d_rho and <d_rho, nu> = -nu_0 / sin rho.
    grad_nu = 2 * cR * lat.normal[..., 0] / (1 + cR * x0)
    return lat.H - grad_nu


def killing_orthogonality(surface_u: LatticeSurface, K, R: float) -> float:
    """``|integral of H_f <K, nu> e^{-f}|`` over a lattice surface in the hemisphere.

    Args:
        surface_u: Lattice surface contacting the equator orthogonally.
        K: Rotation generator fixing ``e0`` (name or index pair).
        R: Cap radius defining ``f = f_R``.
    """
    rho = np.arccos(np.clip(surface_u.points[..., 0], -1, 1))
    _, f = cap_weight(R, rho, 2)
    Kn = np.sum(killing_field(surface_u.points, K) * surface_u.normal, axis=-1)
    return abs(surface_u.integrate(weighted_mean_curvature(surface_u, R) * Kn * np.exp(-f)))


def killing_orthogonality_series(
    u: NeumannField, K, R: float, resolutions=(128, 256), n_s: int = 32
) -> list[float]:
    """Orthogonality integrals of the normal graph of ``u`` at several ``n_t``."""
    out = []
    for n_t in resolutions:
        base = half_clifford(n_t, n_s)
        out.append(killing_orthogonality(normal_graph(base, u), K, R))
    return out


# Centred spheres in a conformal model.

@dataclass
class HypersurfaceCheck:
    """Formula and finite-difference mean curvature of a centred sphere."""

    r: float
    formula: float
    finite_difference: float
    meta: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.formula - self.finite_difference)


def sphere_mean_curvature(r: float, phi: WarpedProfile) -> float:
    """``e^{-phi}(n/r + n phi')`` for the centred sphere of radius ``r``."""
    p, d1, _ = phi.samples(np.array(r))
    return float(np.exp(-p) * phi.n * (1.0 / r + d1))


def conformal_hypersurface_check(r: float, phi: WarpedProfile, h: float = 2.5e-4) -> HypersurfaceCheck:
    """Compare the conformal-change formula with a difference quotient of log area.

    The area of the centred sphere is ``|S^n| (r e^{phi})^n`` and its mean
    curvature is the derivative of ``log area`` along unit radial speed
    ``e^{-phi} d/dr``.
    """
    if not 0 < r - h or r + h > phi.rbar + 1e-15:
        raise DomainError("difference stencil leaves the model ball")
    rs = np.array([r - h, r + h])
    log_area = phi.n * (np.log(rs) + phi.samples(rs)[0])
    fd = float(np.exp(-phi.samples(np.array(r))[0]) * (log_area[1] - log_area[0]) / (2 * h))
    return HypersurfaceCheck(r, sphere_mean_curvature(r, phi), fd, {"h": h})
