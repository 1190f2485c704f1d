"""Sampled rotational annuli and the per-surface geometric checks.

A :class:`RotationalAnnulus` carries closed-form geometry (from the
profile's moving frame) on a ``(t, s)`` lattice.  Checks that must see
discretisation error, such as conormal derivatives, use the lattice
finite-difference engine in :mod:`caplab.lattice`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import SimpleNamespace

import numpy as np
from scipy import ndimage
from scipy.optimize import bisect

from .errors import ContactLost, DegenerateSlice, DomainError, SignMismatch
from .lattice import LatticeSurface, d_t
from .rotational import ContactData, ProfileSolution, SphereProfileFrame
from .sphere import E0, CapParams


class CatenoidFrame:
    """Closed-form frame of ``c (cosh t cos s, cosh t sin s, t)`` in R^3."""

    ambient = "euclid"
    kappa = 0.0
    dim = 3

    def __init__(self, c: float, sign: int = 1):
        self.c = float(c)
        self.sign = int(sign)

    def scalars(self, t) -> SimpleNamespace:
        t = np.asarray(t, dtype=float)
        g = (self.c * np.cosh(t)) ** 2
        return SimpleNamespace(
            t=t,
            g_tt=g,
            g_ss=g.copy(),
            A_tt=np.full(t.shape, self.sign * self.c),
            A_ss=np.full(t.shape, -self.sign * self.c),
            A_ts=np.zeros(t.shape),
        )

    def lattice(self, t, s) -> dict:
        c, sg = self.c, self.sign
        t = np.asarray(t, dtype=float)[:, None]
        s = np.asarray(s, dtype=float)[None, :]
        ch, sh = np.cosh(t), np.sinh(t)
        cs, sn = np.cos(s), np.sin(s)
        one = np.ones_like(t * s)
        zero = np.zeros_like(one)
        st = lambda *v: np.stack(np.broadcast_arrays(*v), axis=-1)
        return {
            "x": c * st(ch * cs, ch * sn, t * one),
            "x_t": c * st(sh * cs, sh * sn, one),
            "x_s": c * st(-ch * sn, ch * cs, zero),
            "x_tt": c * st(ch * cs, ch * sn, zero),
            "x_ss": c * st(-ch * cs, -ch * sn, zero),
            "x_ts": c * st(-sh * sn, sh * cs, zero),
            "nu": sg * st(-cs / ch, -sn / ch, sh / ch * one),
            "nu_t": sg * st(cs * sh / ch**2, sn * sh / ch**2, one / ch**2),
            "nu_s": sg * st(sn / ch, -cs / ch, zero),
        }


def catenoid_neck_parameter() -> float:
    """Positive root of ``t tanh t = 1`` by bisection on ``[1, 1.5]``."""
    return float(bisect(lambda t: t * np.tanh(t) - 1.0, 1.0, 1.5, xtol=1e-15, rtol=1e-15))


@dataclass(frozen=True)
class RotationalAnnulus:
    """A truncated rotational minimal annulus sampled on a ``(t, s)`` lattice.

    The metric and second fundamental form depend on ``t`` only, so
    ``g_tt``, ``g_ss``, ``A_tt``, ``A_ss`` and ``A_ts`` are stored per row.

    Attributes:
        t: ``n_t`` uniform nodes on ``[-t_plus, t_plus]``.
        s: ``n_s`` uniform nodes on ``[0, 2 pi)``.
        points: Embedding, shape ``(n_t, n_s, d)``.
        normals: Unit normal, same shape.
        g_tt, g_ss, A_tt, A_ss, A_ts: Per-row fundamental forms.
        ambient: ``"sphere"`` (curvature 1) or ``"euclid"`` (curvature 0).
        profile: Generating profile, ``None`` for the catenoid.
        contact: Truncation and contact data.
        frame: Closed-form frame used to evaluate geometry off the lattice.
        meta: Assembly diagnostics.
    """

    t: np.ndarray
    s: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    g_tt: np.ndarray
    g_ss: np.ndarray
    A_tt: np.ndarray
    A_ss: np.ndarray
    A_ts: np.ndarray
    ambient: str
    profile: ProfileSolution | None
    contact: ContactData
    frame: object = field(repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        return self.frame.kappa

    @property
    def R(self) -> float:
        return self.contact.params.R

    @property
    def gamma(self) -> float:
        return self.contact.params.gamma

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def n_t(self) -> int:
        return self.t.size

    @property
    def n_s(self) -> int:
        return self.s.size

    @cached_property
    def closed_form(self) -> dict:
        return self.frame.lattice(self.t, self.s)

    @cached_property
    def A_norm_sq(self) -> np.ndarray:
        return (self.A_tt / self.g_tt) ** 2 + (self.A_ss / self.g_ss) ** 2

    @cached_property
    def mean_curvature(self) -> np.ndarray:
        return self.A_tt / self.g_tt + self.A_ss / self.g_ss

    def lattice(self) -> LatticeSurface:
        """The same samples viewed through the finite-difference engine."""
        return LatticeSurface(self.t, self.s, self.points, self.normals)

    def with_resolution(self, n_t: int, n_s: int | None = None) -> "RotationalAnnulus":
        """Rebuild the same surface on a different lattice."""
        return _assemble(self.frame, self.profile, self.contact, n_t, n_s or self.n_s)


def _assemble(frame, profile, contact, n_t: int, n_s: int) -> RotationalAnnulus:
    if n_t < 32 or n_s < 16:
        raise DomainError("need n_t >= 32 and n_s >= 16")
    t = np.linspace(-contact.t_plus, contact.t_plus, n_t)
    s = 2 * np.pi * np.arange(n_s) / n_s
    sc = frame.scalars(t)
    cf = frame.lattice(t, s)
    h = t[1] - t[0]
    ip = lambda a, b: np.sum(a * b, axis=-1)
    fd_xt = (cf["x"][2:] - cf["x"][:-2]) / (2 * h)
    fd_nu_t = (cf["nu"][2:] - cf["nu"][:-2]) / (2 * h)
    nu = cf["nu"]
    meta = {
        "n_t": n_t,
        "n_s": n_s,
        "fd_deviation": float(
            max(np.abs(fd_xt - cf["x_t"][1:-1]).max(), np.abs(fd_nu_t - cf["nu_t"][1:-1]).max())
        ),
        "metric_offdiag": float(np.abs(ip(cf["x_t"], cf["x_s"])).max()),
        "normal_unit": float(np.abs(ip(nu, nu) - 1).max()),
        "normal_tangency": float(
            max(np.abs(ip(nu, cf["x_t"])).max(), np.abs(ip(nu, cf["x_s"])).max())
        ),
        "mean_curvature": float(np.abs(sc.A_tt / sc.g_tt + sc.A_ss / sc.g_ss).max()),
        "A_ts": float(np.abs(ip(cf["nu"], cf["x_ts"])).max()),
    }
    if frame.ambient == "sphere":
        meta["normal_radial"] = float(np.abs(ip(nu, cf["x"])).max())
    return RotationalAnnulus(
        t, s, cf["x"], nu, sc.g_tt, sc.g_ss, sc.A_tt, sc.A_ss, sc.A_ts,
        frame.ambient, profile, contact, frame, meta,
    )


def build_annulus(
    profile: ProfileSolution, contact: ContactData, n_t: int = 256, n_s: int = 32
) -> RotationalAnnulus:
    """Sample the truncated rotational surface in S^3.

    The closed-form tangents and normal are cross-checked against central
    differences at the lattice spacing; the largest deviation is stored in
    ``meta["fd_deviation"]``.

    Raises:
        DomainError: If the lattice is too coarse.
        RangeError: If the truncation exceeds the integrated profile.
    """
    frame = SphereProfileFrame(profile, contact.normal_sign)
    return _assemble(frame, profile, contact, n_t, n_s)


def build_catenoid(n_t: int = 256, n_s: int = 32) -> RotationalAnnulus:
    """Free-boundary catenoid in the Euclidean unit ball.

    The neck parameter ``t0`` solves ``t tanh t = 1`` and the scale is
    ``c = 1 / (t0 cosh t0)``, so the boundary circles lie on the unit
    sphere and meet it orthogonally.
    """
    t0 = catenoid_neck_parameter()
    c = 1.0 / (t0 * np.cosh(t0))
    frame = CatenoidFrame(c)
    contact = ContactData(
        t0, CapParams(1.0, np.pi / 2, 1), 0.0, 1, "free", {"t0": t0, "scale": c, "ball_radius": 1.0}
    )
    ann = _assemble(frame, None, contact, n_t, n_s)
    x, xt = ann.points[[0, -1]], ann.closed_form["x_t"][[0, -1]]
    eta = xt / np.linalg.norm(xt, axis=-1, keepdims=True) * np.array([-1.0, 1.0])[:, None, None]
    radial = x / np.linalg.norm(x, axis=-1, keepdims=True)
    ann.meta["boundary_orthogonality"] = float(np.abs(np.sum(eta * radial, axis=-1) - 1).max())
    ann.meta["boundary_radius"] = float(np.abs(np.linalg.norm(x, axis=-1) - 1).max())
    return ann


def boundary_rows(surface) -> tuple[int, int]:
    return 0, surface.n_t - 1


def boundary_relations_check(surface: RotationalAnnulus, method: str = "closed") -> dict:
    """Residuals of the boundary relations of a capillary minimal annulus.

    With ``method="closed"`` the conormal derivatives come from the
    closed-form frame; with ``method="lattice"`` they use one-sided
    second-order differences on the lattice and so carry an ``O(h^2)``
    error, which is what a refinement study measures.  The fourth relation
    is evaluated as ``d_eta nu0 = -sin R sin(gamma) A(eta, eta)``, the form
    that stays finite at ``gamma = pi/2``.

    Returns:
        Sup-norm residuals over both boundary circles keyed ``x0``,
        ``d_eta_x0``, ``nu0``, ``d_eta_nu0`` and, when ``R = pi/2``,
        ``d_eta_nu_a``; ``max`` holds the largest.
    """
    if method not in ("closed", "lattice"):
        raise DomainError("method must be 'closed' or 'lattice'")
    R, gam = surface.R, surface.gamma
    x, nu = surface.points, surface.normals
    rows = [0, -1]
    signs = np.array([-1.0, 1.0])[:, None]
    sq = np.sqrt(surface.g_tt[rows])[:, None]
    aee = (surface.A_tt / surface.g_tt)[rows][:, None]
    cf = surface.closed_form

    def d_eta(F, key, comp):
        if method == "closed":
            return signs * cf[key][rows, :, comp] / sq
        return signs * d_t(F[..., comp], surface.h)[rows] / sq

    out = {
        "x0": float(np.abs(x[rows, :, 0] - np.cos(R)).max()),
        "d_eta_x0": float(np.abs(d_eta(x, "x_t", 0) + np.sin(R) * np.sin(gam)).max()),
        "nu0": float(np.abs(nu[rows, :, 0] + np.sin(R) * np.cos(gam)).max()),
        "d_eta_nu0": float(np.abs(d_eta(nu, "nu_t", 0) + np.sin(R) * np.sin(gam) * aee).max()),
    }
    if abs(R - np.pi / 2) < 1e-10:
        cot_g = np.cos(gam) / np.sin(gam)
        out["d_eta_nu_a"] = float(
            max(
                np.abs(d_eta(nu, "nu_t", a) + cot_g * aee * nu[rows, :, a]).max()
                for a in (1, 2, 3)
            )
        )
    out["max"] = max(out.values())
    return out


def a_eta_eta(surface: RotationalAnnulus, boundary: str = "plus") -> float:
    """``A(eta, eta)`` on the named boundary circle.

    Raises:
        SignMismatch: If the two boundary circles carry different signs.
    """
    vals = surface.A_tt[[0, -1]] / surface.g_tt[[0, -1]]
    if np.sign(vals[0]) != np.sign(vals[1]) or np.any(vals == 0):
        raise SignMismatch(f"A(eta,eta) = {vals.tolist()} on the two boundaries")
    if boundary not in ("plus", "minus"):
        raise DomainError("boundary must be 'plus' or 'minus'")
    return float(vals[1] if boundary == "plus" else vals[0])


@dataclass(frozen=True)
class HopfReport:
    max: float
    min: float
    spread: float


def hopf_density(surface) -> np.ndarray:
    """``2 g_ss^2 |A_0|^2`` per row (rotational) or per node (lattice)."""
    if isinstance(surface, RotationalAnnulus):
        traceless = surface.A_norm_sq - surface.mean_curvature**2 / 2
        return 2 * surface.g_ss**2 * traceless
    traceless = surface.A_norm_sq - surface.H**2 / 2
    return 2 * surface.g[2] ** 2 * traceless


def hopf_constancy(surface) -> HopfReport:
    """Relative spread ``(max - min) / max`` of the Hopf density."""
    phi = hopf_density(surface)
    hi, lo = float(phi.max()), float(phi.min())
    return HopfReport(hi, lo, (hi - lo) / hi)


def _rho_pairing(points, normals):
    x0 = points[..., 0]
    sin_rho = np.sqrt(np.clip(1 - x0 * x0, 0, None))
    return -normals[..., 0] / sin_rho


@dataclass(frozen=True)
class RadialGraphReport:
    is_radial_graph: bool
    min_abs_pairing: float


def radial_graph_check(surface) -> RadialGraphReport:
    """Whether ``<d_rho, nu>`` keeps a strict sign on the interior rows."""
    x, nu = surface.points[1:-1], surface.normals[1:-1]
    if np.max(x[..., 0]) > 1 - 1e-12:
        raise DomainError("surface passes through the cap centre")
    p = _rho_pairing(x, nu)
    strict = bool(np.all(p > 0) or np.all(p < 0))
    return RadialGraphReport(strict, float(np.abs(p).min()))


@dataclass(frozen=True)
class ConstrainedReport:
    constrained: bool
    min_x0: float
    max_rho: float
    R: float


def constrained_check(surface, R: float | None = None) -> ConstrainedReport:
    """Whether the surface stays in the closed ball ``B_R``.

    For ``R <= pi/2`` rotational annuli this is decided by ``x0 >= 0``;
    for larger radii by ``max rho <= R``.

    Args:
        surface: Any object with a ``points`` lattice.
        R: Ball radius to test against; defaults to the surface's own cap.
    """
    x0 = surface.points[..., 0]
    rho = np.arccos(np.clip(x0, -1, 1))
    R = surface.R if R is None else float(R)
    ok = bool(x0.min() >= -1e-10) if R <= np.pi / 2 else bool(rho.max() <= R + 1e-10)
    return ConstrainedReport(ok, float(x0.min()), float(rho.max()), R)


def _count_periodic_components(mask: np.ndarray) -> int:
    labels, n = ndimage.label(mask)
    if n == 0:
        return 0
    parent = list(range(n + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(labels[:, 0], labels[:, -1]):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(1, n + 1)})


def two_piece_slices(surface, a) -> tuple[int, int]:
    """Component counts of ``{x_a > 0}`` and ``{x_a < 0}`` on the lattice.

    Connectivity is 4-neighbour with periodic ``s``; nodes with
    ``|x_a| < 1e-9`` belong to neither side.

    Raises:
        DomainError: If ``a`` is not a unit vector orthogonal to ``e0``.
        DegenerateSlice: If more than 10% of nodes lie on the slice.
    """
    a = np.asarray(a, dtype=float)
    if abs(np.linalg.norm(a) - 1) > 1e-10 or abs(a[0]) > 1e-12:
        raise DomainError("a must be a unit vector orthogonal to e0")
    xa = surface.points @ a
    zero = np.abs(xa) < 1e-9
    if zero.mean() > 0.1:
        raise DegenerateSlice(f"{zero.mean():.1%} of nodes on the slicing plane")
    return _count_periodic_components(xa > 1e-9), _count_periodic_components(xa < -1e-9)


def _boundary_line_element(surface, row):
    if isinstance(surface, RotationalAnnulus):
        return np.full(surface.n_s, np.sqrt(surface.g_ss[row]))
    return np.linalg.norm(surface.X_s[row], axis=-1)


def green_identity_check(surface, a) -> float:
    """``|integral of x_a over both boundary circles|`` by the periodic trapezoid rule."""
    a = np.asarray(a, dtype=float)
    ds = 2 * np.pi / surface.s.size
    total = 0.0
    for row in (0, -1):
        total += np.sum(surface.points[row] @ a * _boundary_line_element(surface, row)) * ds
    return float(abs(total))


@dataclass(frozen=True)
class NeumannField:
    """Scalar field ``sum_j c_j cos(m_j pi (t + t_b) / (2 t_b)) trig(k_j s)``.

    Every term has zero ``t``-derivative at ``t = +-t_b``.

    Attributes:
        t_b: Half-width of the ``t`` interval.
        terms: Tuples ``(amplitude, m, k, phase)``; ``trig = cos(k s + phase)``.
    """

    t_b: float
    terms: tuple

    def _omega(self, m):
        return m * np.pi / (2 * self.t_b)

    def __call__(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        out = np.zeros(t.shape)
        for amp, m, k, ph in self.terms:
            out += amp * np.cos(self._omega(m) * (t + self.t_b)) * np.cos(k * s + ph)
        return out

    def dt(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        out = np.zeros(t.shape)
        for amp, m, k, ph in self.terms:
            w = self._omega(m)
            out -= amp * w * np.sin(w * (t + self.t_b)) * np.cos(k * s + ph)
        return out

    def scaled(self, factor: float) -> "NeumannField":
        return NeumannField(self.t_b, tuple((a * factor, m, k, p) for a, m, k, p in self.terms))

    def sup_norm(self, n: int = 257, n_s: int = 64) -> float:
        t = np.linspace(-self.t_b, self.t_b, n)[:, None]
        s = 2 * np.pi * np.arange(n_s)[None, :] / n_s
        return float(np.abs(self(t, s)).max())


def random_neumann_field(
    rng: np.random.Generator, t_b: float, sup: float = 0.05, m_max: int = 3, k_max: int = 2
) -> NeumannField:
    """Random low-order Neumann field rescaled so that its sup norm equals ``sup``."""
    terms = []
    for m in range(m_max + 1):
        for k in range(k_max + 1):
            terms.append((rng.standard_normal(), m, k, rng.uniform(0, 2 * np.pi)))
    field_ = NeumannField(t_b, tuple(terms))
    return field_.scaled(sup / field_.sup_norm())


def normal_graph(surface: RotationalAnnulus, u: NeumannField) -> LatticeSurface:
    """Normal graph ``cos(u) x + sin(u) nu`` over a free-boundary annulus at ``R = pi/2``.

    Raises:
        DomainError: If the base is not free-boundary in the hemisphere, if
            ``u`` is not Neumann on the boundary rows, or ``|u| >= 0.1``.
        ContactLost: If the boundary leaves the equator by more than 1e-6.
    """
    if abs(surface.R - np.pi / 2) > 1e-10 or abs(surface.gamma - np.pi / 2) > 1e-10:
        raise DomainError("normal graphs are built over free-boundary annuli in the hemisphere")
    T, S = np.meshgrid(surface.t, surface.s, indexing="ij")
    uu = u(T, S)
    if np.abs(uu).max() >= 0.1:
        raise DomainError("normal-graph height must satisfy |u| < 0.1")
    if np.abs(u.dt(T[[0, -1]], S[[0, -1]])).max() > 1e-8:
        raise DomainError("height is not Neumann on the boundary rows")
    pts = np.cos(uu)[..., None] * surface.points + np.sin(uu)[..., None] * surface.normals
    drift = np.abs(pts[[0, -1], :, 0]).max()
    if drift > 1e-6:
        raise ContactLost(f"boundary left the equator by {drift:.2e}")
    return LatticeSurface(surface.t, surface.s, pts, surface.normals)


def contact_angle_residual(lat: LatticeSurface) -> float:
    """Largest ``|<nu, d_rho>|`` on the boundary rows of a hemisphere surface."""
    rows = [0, -1]
    return float(np.abs(_rho_pairing(lat.points[rows], lat.normal[rows])).max())
