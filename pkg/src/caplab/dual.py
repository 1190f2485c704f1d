"""Polar duals of rotational minimal annuli in S^3.

The dual of a minimal immersion ``x`` with unit normal ``nu`` is
``x~ = eps nu``.  Its metric is ``Psi g`` with ``Psi = |A|^2 / 2``, its
unit normal is ``eps x`` and, with that choice, its second fundamental
form agrees with ``A`` in the common coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDual, DomainError, ProjectionDegenerate, UmbilicError
from .lattice import LatticeSurface, cross4, d_s, d_t
from .sphere import CapParams
from .surface import RotationalAnnulus, a_eta_eta


def dual_params(params: CapParams) -> CapParams:
    """Contact data of the polar dual.

    ``cos R~ = -eps sin R cos(gamma)`` and
    ``sin(gamma~) = sin R sin(gamma) / sin R~``, evaluated through
    ``sin R~ cos(gamma~) = |cos R|``.  The returned sign is
    ``-sign(cos R)`` (kept as ``eps`` when ``cos R = 0``), which is the
    orientation sign of the dual under the outward capillary convention,
    so applying the map twice recovers ``(R, gamma)``.

    Raises:
        DegenerateDual: If ``sin R~ < 1e-12``.
    """
    R, gam, eps = params.R, params.gamma, params.epsilon
    cR, sR = np.cos(R), np.sin(R)
    # sin^2 R~ = cos^2 R + sin^2 R sin^2 gamma and sin R~ cos gamma~ = |cos R|;
    # atan2 keeps both angles well conditioned near pi/2.
    sin_Rt = float(np.hypot(cR, sR * np.sin(gam)))
    if sin_Rt < 1e-12:
        raise DegenerateDual(f"dual radius is degenerate (sin R~ = {sin_Rt:.1e})")
    R_t = float(np.arctan2(sin_Rt, -eps * sR * np.cos(gam)))
    gam_t = float(np.arctan2(sR * np.sin(gam), abs(cR)))
    eps_t = eps if abs(cR) < 1e-15 else int(-np.sign(cR))
    out = CapParams(R_t, gam_t, eps_t)
    if abs(np.sin(out.gamma) * np.sin(out.R) - np.sin(R) * np.sin(gam)) > 1e-14:
        raise DegenerateDual("sine relation of the dual parameters failed")
    return out


@dataclass(frozen=True)
class DualSurface:
    """Polar dual of a :class:`RotationalAnnulus`.

    Attributes:
        base: Source surface.
        points: ``eps * nu`` on the base lattice.
        normals: ``eps * x``, re-orthonormalised against the dual tangents.
        dual_params: Contact data predicted by :func:`dual_params`.
        Psi: Conformal factor ``|A|^2 / 2`` per row.
        tangents: Closed-form dual tangents ``(x~_t, x~_s)``.
        meta: Residuals of the duality relations.
    """

    base: RotationalAnnulus
    points: np.ndarray
    normals: np.ndarray
    dual_params: CapParams
    Psi: np.ndarray
    tangents: tuple = field(repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def epsilon(self) -> int:
        return self.base.contact.params.epsilon

    @property
    def t(self):
        return self.base.t

    @property
    def s(self):
        return self.base.s

    @property
    def R(self) -> float:
        return self.dual_params.R

    def lattice(self, order: int = 2) -> LatticeSurface:
        return LatticeSurface(self.base.t, self.base.s, self.points, self.normals, order)

    def measured_radius(self) -> float:
        """Largest ``arccos <x~, e0>`` over the two boundary circles."""
        x0 = self.points[[0, -1], :, 0]
        return float(np.arccos(np.clip(x0, -1, 1)).max())

    def measured_contact_angle(self) -> float:
        """``arcsin <eta~, d_rho>`` averaged over the boundary circles."""
        xt = self.tangents[0][[0, -1]]
        sign = np.array([-1.0, 1.0])[:, None, None]
        eta = sign * xt / np.linalg.norm(xt, axis=-1, keepdims=True)
        x0 = self.points[[0, -1], :, 0]
        sin_g = -eta[..., 0] / np.sqrt(1 - x0**2)
        return float(np.arcsin(np.clip(sin_g, -1, 1)).mean())


def _ip(a, b):
    return np.sum(a * b, axis=-1)


def dual_surface(surface: RotationalAnnulus) -> DualSurface:
    """Polar dual ``eps nu`` of an annulus in S^3.

    Raises:
        DomainError: If the surface is not in S^3.
        UmbilicError: If ``|A|`` nearly vanishes somewhere.
        SignMismatch: If ``A(eta, eta)`` changes sign between boundaries.
    """
    if surface.ambient != "sphere":
        raise DomainError("polar duals are defined for surfaces in S^3")
    A_norm = np.sqrt(surface.A_norm_sq)
    if A_norm.min() < 1e-8:
        raise UmbilicError(f"min |A| = {A_norm.min():.2e}")
    eps = surface.contact.params.epsilon
    if int(np.sign(a_eta_eta(surface, "minus"))) != eps:
        raise DomainError("stored orientation sign disagrees with A(eta, eta)")
    cf = surface.closed_form
    x, nu = cf["x"], cf["nu"]
    xd, xd_t, xd_s = eps * nu, eps * cf["nu_t"], eps * cf["nu_s"]
    Psi = surface.A_norm_sq / 2
    P = Psi[:, None]

    # Normal eps*x, re-orthonormalised against the dual tangent frame.
    n = eps * x
    basis = [xd]
    for v in (xd_t, xd_s):
        for b in basis:
            v = v - _ip(v, b)[..., None] * b
        basis.append(v / np.linalg.norm(v, axis=-1, keepdims=True))
    n_ortho = n.copy()
    for b in basis:
        n_ortho = n_ortho - _ip(n_ortho, b)[..., None] * b
    n_ortho /= np.linalg.norm(n_ortho, axis=-1, keepdims=True)

    g_t = (_ip(xd_t, xd_t), _ip(xd_t, xd_s), _ip(xd_s, xd_s))
    g_b = (surface.g_tt[:, None], 0.0, surface.g_ss[:, None])
    At = (
        eps * _ip(cf["x_t"], xd_t),
        eps * _ip(cf["x_t"], xd_s),
        eps * _ip(cf["x_s"], xd_s),
    )
    A_b = (surface.A_tt[:, None], surface.A_ts[:, None], surface.A_ss[:, None])
    params = dual_params(surface.contact.params)
    meta = {
        "metric_relation": float(max(np.abs(a - P * b).max() for a, b in zip(g_t, g_b))),
        "metric_offdiag": float(np.abs(g_t[1]).max()),
        "normal_reorth": float(np.abs(n_ortho - n).max()),
        "A_tilde_vs_A": float(max(np.abs(a - b).max() for a, b in zip(At, A_b))),
        "boundary_x0": float(np.abs(xd[[0, -1], :, 0] - np.cos(params.R)).max()),
    }
    return DualSurface(surface, xd, n_ortho, params, Psi, (xd_t, xd_s), meta)


@dataclass(frozen=True)
class DoubleDualReport:
    distance: float
    sign: int
    psi_product: float


def double_dual_check(dual: DualSurface) -> DoubleDualReport:
    """Compare the dual of the dual with ``+-x`` and check ``Psi~ Psi = 1``.

    The normal of ``x~`` is recomputed from the dual tangents by the
    four-dimensional cross product, and ``Psi~`` from the dual metric and
    the second fundamental form ``<d nu~, d x~>``.
    """
    base = dual.base
    x = base.closed_form["x"]
    xt_d, xs_d = dual.tangents
    n = cross4(dual.points, xt_d, xs_d)
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    d_plus, d_minus = np.abs(n - x).max(), np.abs(n + x).max()
    sign = 1 if d_plus <= d_minus else -1
    eps = dual.epsilon
    cf = base.closed_form
    gtt, gts, gss = _ip(xt_d, xt_d), _ip(xt_d, xs_d), _ip(xs_d, xs_d)
    det = gtt * gss - gts**2
    itt, its, iss = gss / det, -gts / det, gtt / det
    att = eps * _ip(cf["x_t"], xt_d)
    ats = eps * _ip(cf["x_t"], xs_d)
    ast = eps * _ip(cf["x_s"], xt_d)
    ass = eps * _ip(cf["x_s"], xs_d)
    S = np.array([[itt * att + its * ast, itt * ats + its * ass],
                  [its * att + iss * ast, its * ats + iss * ass]])
    norm_sq = S[0, 0] ** 2 + S[0, 1] * S[1, 0] * 2 + S[1, 1] ** 2
    psi_t = norm_sq / 2
    prod = float(np.abs(psi_t * dual.Psi[:, None] - 1).max())
    return DoubleDualReport(float(min(d_plus, d_minus)), sign, prod)


@dataclass(frozen=True)
class GaussMapReport:
    n: np.ndarray
    min_abs_det: float
    boundary_deviation: float


def projected_gauss_map(surface) -> GaussMapReport:
    """Projected Gauss map ``(nu - nu0 e0) / |nu - nu0 e0|`` and its Jacobian.

    The Jacobian determinant is taken with lattice differences and
    normalised by the area element; ``min_abs_det`` is over interior rows.

    Raises:
        DomainError: If the surface has ``R >= pi/2``.
        ProjectionDegenerate: If ``nu0^2 >= 1 - 1e-10`` somewhere.
    """
    R = getattr(surface, "R", None)
    if R is not None and R >= np.pi / 2:
        raise DomainError("the projected Gauss map is studied for R < pi/2")
    nu = np.asarray(surface.normals)
    nu0 = nu[..., 0]
    if np.any(nu0**2 >= 1 - 1e-10):
        raise ProjectionDegenerate("normal parallel to e0")
    n = nu[..., 1:] / np.sqrt(1 - nu0**2)[..., None]
    h = float(surface.t[1] - surface.t[0])
    n_t, n_s = d_t(n, h), d_s(n)
    pts = np.asarray(surface.points)
    xt, xs = d_t(pts, h), d_s(pts)
    area = np.sqrt(_ip(xt, xt) * _ip(xs, xs) - _ip(xt, xs) ** 2)
    det = _ip(n, np.cross(n_t, n_s)) / area
    bdev = float(np.abs(n[[0, -1]] - nu[[0, -1], :, 1:]).max())
    return GaussMapReport(n, float(np.abs(det[1:-1]).min()), bdev)
