"""Rotationally symmetric minimal annuli in S^3: profile ODE, contact detection and sweeps.

The surfaces are parametrised as

    x(s, t) = (r cos t, r sin t, w cos s, w sin s),   w = sqrt(1 - r^2),

and are minimal exactly when the profile ``r(t)`` solves

    r (1 - r^2) r'' = (1 - 2 r^2) (2 r'^2 + r^2 (1 - r^2)).

Profiles start at a symmetric neck ``(r, r') = (r0, 0)`` and are extended
to negative ``t`` by even reflection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from types import SimpleNamespace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (
    DomainError,
    InconsistentContact,
    NoContactError,
    RangeError,
    SignMismatch,
    SingularityError,
    StepFailure,
)
from .sphere import E0, CapParams, SpherePoint

SINGULAR_DELTA = 1e-8
# Necks closer to 0 or 1 than this band are rejected before integrating.
NECK_BAND = (0.005, 0.998)
CLIFFORD_R0 = 1.0 / np.sqrt(2.0)
DEFAULT_TOL = 1e-12
DEFAULT_T_MAX = 3.0
ROOT_XTOL = 1e-14
ROOT_SCAN = 4000


def ode_rhs(t: float, state) -> np.ndarray:
    """Right-hand side of the first-order system for ``(r, r')``.

    Raises:
        SingularityError: If ``r (1 - r^2) < 1e-8``.
    """
    r, rp = state[0], state[1]
    denom = r * (1.0 - r * r)
    if np.any(denom < SINGULAR_DELTA) or not np.all(np.isfinite(denom)):
        raise SingularityError(f"r(1-r^2) = {np.min(denom):.3e} left the admissible band")
    rpp = (1.0 - 2.0 * r * r) * (2.0 * rp * rp + r * r * (1.0 - r * r)) / denom
    return np.array([rp, rpp])


def profile_acceleration(r, rp):
    """Vectorised ``r''`` from the minimal-surface ODE (no guard)."""
    return (1.0 - 2.0 * r * r) * (2.0 * rp * rp + r * r * (1.0 - r * r)) / (r * (1.0 - r * r))


@dataclass(frozen=True)
class ProfileSolution:
    """Dense solution of the profile ODE on ``[-t_max, t_max]``.

    Attributes:
        t_grid: Increasing sample parameters (integrator steps, mirrored).
        r: Profile values at ``t_grid``.
        rp: Profile derivative at ``t_grid``.
        r0: Neck radius ``r(0)``.
        integrator_meta: Method tag, tolerance and step limit.
    """

    t_grid: np.ndarray
    r: np.ndarray
    rp: np.ndarray
    r0: float
    integrator_meta: dict
    dense: Callable = field(repr=False, compare=False, default=None)

    @property
    def t_max(self) -> float:
        return float(self.t_grid[-1])

    def evaluate(self, t):
        """Return ``(r, r')`` at ``t`` using the even extension.

        Raises:
            RangeError: If ``|t|`` exceeds the integrated range.
        """
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) > self.t_max * (1 + 1e-14) + 1e-14):
            raise RangeError(f"t outside [-{self.t_max}, {self.t_max}]")
        at = np.minimum(np.abs(t), self.t_max)
        y = self.dense(at.ravel()).reshape((2,) + at.shape)
        return y[0], np.sign(t) * y[1]

    def evaluate_all(self, t):
        """Return ``(r, r', r'')`` with ``r''`` taken from the ODE."""
        r, rp = self.evaluate(t)
        return r, rp, profile_acceleration(r, rp)


class _ConstantDense:
    def __init__(self, r0: float):
        self.r0 = r0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.full(t.shape, self.r0), np.zeros(t.shape)])


def integrate_profile(
    r0: float, t_max: float = DEFAULT_T_MAX, tol: float = DEFAULT_TOL, max_step: float = np.inf
) -> ProfileSolution:
    """Integrate the profile ODE from the neck ``(r0, 0)``.

    Args:
        r0: Neck radius; must lie inside the admissible band ``(0.005, 0.998)``.
        t_max: Integration half-range.
        tol: Relative and absolute tolerance of the DOP853 integrator.
        max_step: Optional step cap.

    Raises:
        DomainError: If ``r0`` is not in ``(0, 1)`` or ``tol`` is out of range.
        SingularityError: If ``r0`` is in the near-singular band or the
            solution approaches ``r(1 - r^2) = 0``.
        StepFailure: If the step-size controller fails.
    """
    if not 0.0 < r0 < 1.0:
        raise DomainError(f"r0={r0} outside (0, 1)")
    if not 1e-13 <= tol <= 1e-6:
        raise DomainError(f"tol={tol} outside [1e-13, 1e-6]")
    if not NECK_BAND[0] < r0 < NECK_BAND[1]:
        raise SingularityError(
            f"neck radius r0={r0} lies in the near-singular band outside {NECK_BAND}"
        )
    meta = {"method": "DOP853", "tol": tol, "max_step": None if np.isinf(max_step) else max_step}
    if r0 == CLIFFORD_R0:
        # Exact constant solution; the ODE right side vanishes up to roundoff.
        tp = np.linspace(0.0, t_max, 65)
        dense = _ConstantDense(r0)
        r_pos, rp_pos = dense(tp)
    else:
        def band(t, y):
            return y[0] * (1.0 - y[0] ** 2) - 2.0 * SINGULAR_DELTA

        band.terminal = True
        sol = solve_ivp(
            lambda t, y: ode_rhs(t, y),
            (0.0, t_max),
            [r0, 0.0],
            method="DOP853",
            rtol=tol,
            atol=tol,
            dense_output=True,
            events=band,
            max_step=max_step,
        )
        if sol.status == 1:
            raise SingularityError(
                f"profile from r0={r0} reaches the singular band at t={sol.t[-1]:.6g}"
            )
        if sol.status != 0:
            raise StepFailure(sol.message)
        if not np.all(np.isfinite(sol.y)):
            raise StepFailure("non-finite values in the integrated profile")
        tp, (r_pos, rp_pos), dense = sol.t, sol.y, sol.sol
    t_grid = np.concatenate([-tp[:0:-1], tp])
    r = np.concatenate([r_pos[:0:-1], r_pos])
    rp = np.concatenate([-rp_pos[:0:-1], rp_pos])
    return ProfileSolution(t_grid, r, rp, float(r0), meta, dense)


def ode_residual(profile: ProfileSolution, t, h: float = 5e-5) -> np.ndarray:
    """Scaled residual of the profile ODE re-evaluated on the dense interpolant.

    ``r''`` is taken from a five-point difference of the interpolated
    ``r'`` and compared with the ODE's right-hand side; the difference is
    divided by ``1 + |r''|`` so that sharply turning profiles near the
    ends of the admissible band are measured on the same footing.
    """
    t = np.asarray(t, dtype=float)
    lim = profile.t_max - 2 * h
    t = np.clip(t, -lim, lim)
    rp = lambda u: profile.evaluate(u)[1]
    rpp_fd = (-rp(t + 2 * h) + 8 * rp(t + h) - 8 * rp(t - h) + rp(t - 2 * h)) / (12 * h)
    r, rpv = profile.evaluate(t)
    rpp = profile_acceleration(r, rpv)
    return np.abs(rpp_fd - rpp) / (1.0 + np.abs(rpp))


def embed(profile: ProfileSolution, s, t):
    """Point ``x(s, t)`` of the rotational surface.

    Scalars give a :class:`SpherePoint`; arrays broadcast to ``(..., 4)``.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)
    r, _ = profile.evaluate(t)
    w = np.sqrt(1.0 - r * r)
    x = np.stack([r * np.cos(t), r * np.sin(t), w * np.cos(s), w * np.sin(s)], axis=-1)
    return SpherePoint(x) if x.ndim == 1 else x


def _nu_denominator(r, rp):
    d = np.sqrt(rp * rp + r * r * (1.0 - r * r))
    if np.any(d < 1e-12):
        raise SingularityError("normal denominator vanishes")
    return d


def nu0(profile: ProfileSolution, t):
    """``<nu, e0>`` along the profile for the reference orientation."""
    r, rp = profile.evaluate(t)
    d = _nu_denominator(r, rp)
    return (r * (1.0 - r * r) * np.cos(t) + rp * np.sin(t)) / d


def nu0_dt(profile: ProfileSolution, t):
    """Closed form of ``d nu0 / dt`` valid along solutions of the ODE."""
    r, rp = profile.evaluate(t)
    d = _nu_denominator(r, rp)
    return r * r * (rp * np.cos(t) - r * np.sin(t)) / d


class SphereProfileFrame:
    """Closed-form moving frame of the rotational embedding.

    ``nu = sign * (a E_r + b E_t + c F_r)`` where ``E_r, E_t`` rotate in the
    ``e0 e1`` plane with ``t`` and ``F_r, F_s`` rotate in the ``e2 e3`` plane
    with ``s``.
    """

    ambient = "sphere"
    kappa = 1.0
    dim = 4

    def __init__(self, profile: ProfileSolution, sign: int = 1):
        self.profile = profile
        self.sign = int(sign)

    def scalars(self, t) -> SimpleNamespace:
        t = np.asarray(t, dtype=float)
        r, rp, rpp = self.profile.evaluate_all(t)
        w2 = 1.0 - r * r
        w = np.sqrt(w2)
        wp = -r * rp / w
        wpp = -(rp * rp + r * rpp) / w - r * r * rp * rp / w**3
        q = rp * rp + r * r * w2
        D = np.sqrt(q)
        Dp = (2 * rp * rpp + 2 * r * rp - 4 * r**3 * rp) / (2 * D)
        a, b, c = r * w2 / D, -rp / D, -r * r * w / D
        da = ((1 - 3 * r * r) * rp * D - r * w2 * Dp) / q
        db = -(rpp * D - rp * Dp) / q
        r2w_p = 2 * r * rp * w + r * r * wp
        dc = -(r2w_p * D - r * r * w * Dp) / q
        sg = self.sign
        g_tt = r * r + rp * rp / w2
        g_ss = w2
        A_tt = -sg * (a * (rpp - r) + 2 * b * rp + c * wpp)
        A_ss = -sg * (-c * w)
        return SimpleNamespace(
            t=t, r=r, rp=rp, rpp=rpp, w=w, wp=wp, wpp=wpp, D=D,
            a=sg * a, b=sg * b, c=sg * c, da=sg * da, db=sg * db, dc=sg * dc,
            g_tt=g_tt, g_ss=g_ss, A_tt=A_tt, A_ss=A_ss, A_ts=np.zeros_like(t),
        )

    def lattice(self, t, s) -> dict:
        """Embedding, derivatives and normal on the ``(t, s)`` product grid."""
        sc = self.scalars(t)
        t = sc.t[:, None, None]
        s = np.asarray(s, dtype=float)[None, :, None]
        zt, ot = np.zeros_like(t), np.ones_like(t)
        zs = np.zeros_like(s)
        Er = np.concatenate([np.cos(t), np.sin(t), zt, zt], axis=-1)
        Et = np.concatenate([-np.sin(t), np.cos(t), zt, zt], axis=-1)
        Fr = np.concatenate([zs, zs, np.cos(s), np.sin(s)], axis=-1)
        Fs = np.concatenate([zs, zs, -np.sin(s), np.cos(s)], axis=-1)
        k = lambda v: v[:, None, None]
        return {
            "x": k(sc.r) * Er + k(sc.w) * Fr,
            "x_t": k(sc.rp) * Er + k(sc.r) * Et + k(sc.wp) * Fr,
            "x_s": k(sc.w) * Fs,
            "x_tt": k(sc.rpp - sc.r) * Er + k(2 * sc.rp) * Et + k(sc.wpp) * Fr,
            "x_ss": -k(sc.w) * Fr,
            "x_ts": k(sc.wp) * Fs,
            "nu": k(sc.a) * Er + k(sc.b) * Et + k(sc.c) * Fr,
            "nu_t": k(sc.da - sc.b) * Er + k(sc.a + sc.db) * Et + k(sc.dc) * Fr,
            "nu_s": k(sc.c) * Fs,
        }


@dataclass(frozen=True)
class ContactData:
    """Symmetric truncation ``|t| <= t_plus`` and its contact data.

    Attributes:
        t_plus: Truncation parameter.
        params: Radius, angle, orientation sign and ``kappa``.
        x0_boundary: ``cos R``.
        normal_sign: Orientation applied to the reference normal.
        kind: ``"free"`` or ``"capillary"``.
        diagnostics: Residuals of the contact computations.
    """

    t_plus: float
    params: CapParams
    x0_boundary: float
    normal_sign: int = 1
    kind: str = "free"
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "t_plus": self.t_plus,
            "x0_boundary": self.x0_boundary,
            "normal_sign": self.normal_sign,
            "kind": self.kind,
            **self.params.to_dict(),
            "diagnostics": self.diagnostics,
        }


def _boundary_projections(profile: ProfileSolution, t_b: float):
    """Return ``(R, <eta, d_rho>, <nu_ref, d_rho>)`` at ``t = t_b``."""
    r, rp = profile.evaluate(t_b)
    x0 = r * np.cos(t_b)
    R = float(np.arccos(np.clip(x0, -1.0, 1.0)))
    sin_R = np.sin(R)
    x0_t = rp * np.cos(t_b) - r * np.sin(t_b)
    speed = np.sqrt(r * r + rp * rp / (1.0 - r * r))
    eta_drho = float(-x0_t / (speed * sin_R))
    nu_drho = float(-nu0(profile, t_b) / sin_R)
    return R, eta_drho, nu_drho


def _epsilon(profile: ProfileSolution, t_b: float, sign: int) -> int:
    frame = SphereProfileFrame(profile, sign)
    sc = frame.scalars(np.array([-t_b, t_b]))
    aee = sc.A_tt / sc.g_tt
    if np.sign(aee[0]) != np.sign(aee[1]) or np.any(aee == 0):
        raise SignMismatch(f"A(eta,eta) = {aee} on the two boundary circles")
    return int(np.sign(aee[1]))


def _first_root(f, t_hi: float, n: int = ROOT_SCAN) -> float:
    tt = np.linspace(0.0, t_hi, n + 1)[1:]
    v = f(tt)
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) <= 0)[0]
    if idx.size == 0:
        raise NoContactError(f"no sign change of nu0 on (0, {t_hi}]")
    i = idx[0]
    if v[i] == 0:
        return float(tt[i])
    return float(brentq(f, tt[i], tt[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))


def find_free_boundary(profile: ProfileSolution) -> ContactData:
    """Truncate at the first positive zero of ``nu0`` (contact angle pi/2).

    Raises:
        NoContactError: If ``nu0`` keeps its sign on the integrated range.
        InconsistentContact: If the conormal does not point along ``d_rho``.
    """
    if profile.r0 == CLIFFORD_R0:
        t_plus = np.pi / 2
    else:
        t_plus = _first_root(lambda t: nu0(profile, t), profile.t_max)
    R, eta_drho, nu_drho = _boundary_projections(profile, t_plus)
    if abs(eta_drho - 1.0) > 1e-8:
        raise InconsistentContact(f"<eta, d_rho> = {eta_drho} at a free boundary")
    eps = _epsilon(profile, t_plus, 1)
    diag = {
        "nu0_residual": float(abs(nu0(profile, t_plus))),
        "eta_drho": eta_drho,
        "nu_drho": nu_drho,
    }
    return ContactData(t_plus, CapParams(R, np.pi / 2, eps), float(np.cos(R)), 1, "free", diag)


def find_capillary_boundary(profile: ProfileSolution, t_b: float) -> ContactData:
    """Symmetric truncation at ``|t| = t_b`` with whatever angle results.

    The normal is oriented so that ``<nu, e0> <= 0`` on the boundary, which
    makes ``cos(gamma) >= 0``.

    Raises:
        InconsistentContact: If the two projections of ``d_rho`` disagree or
            the conormal points towards the centre.
    """
    if not 0.0 < t_b <= profile.t_max:
        raise RangeError(f"t_b={t_b} outside (0, {profile.t_max}]")
    R, sin_g, nu_drho = _boundary_projections(profile, t_b)
    sign = 1 if nu_drho >= 0 else -1
    cos_g = sign * nu_drho
    if sin_g <= 0:
        raise InconsistentContact(f"<eta, d_rho> = {sin_g} is not positive")
    unit_gap = abs(sin_g * sin_g + cos_g * cos_g - 1.0)
    gamma = float(np.arcsin(np.clip(sin_g, -1.0, 1.0)))
    if unit_gap > 1e-6 or abs(np.cos(gamma) - cos_g) > 1e-6:
        raise InconsistentContact(f"contact projections disagree (gap {unit_gap:.2e})")
    gamma = float(np.arctan2(sin_g, cos_g))
    eps = _epsilon(profile, t_b, sign)
    diag = {"eta_drho": sin_g, "nu_drho": sign * nu_drho, "unit_gap": unit_gap}
    return ContactData(
        float(t_b), CapParams(R, gamma, eps), float(np.cos(R)), sign, "capillary", diag
    )


@dataclass(frozen=True)
class SweepRow:
    r0: float
    R: float
    t_plus: float
    status: str


@dataclass(frozen=True)
class SweepResult:
    """Free-boundary radius along a grid of neck radii.

    Attributes:
        rows: One row per grid point, sorted by ``r0``.
        R_bar: Largest radius found.
        r0_bar: Neck radius where ``R_bar`` occurs.
        exceeds_half_pi: Whether ``R_bar > pi/2``.
    """

    rows: tuple
    R_bar: float
    r0_bar: float
    exceeds_half_pi: bool

    def ok_rows(self):
        return [row for row in self.rows if row.status == "ok"]


def free_boundary_radius(r0: float, t_max: float = DEFAULT_T_MAX, tol: float = DEFAULT_TOL):
    """Return ``(R, t_plus)`` of the free-boundary truncation for a neck ``r0``."""
    contact = find_free_boundary(integrate_profile(r0, t_max, tol))
    return contact.params.R, contact.t_plus


def default_sweep_grid(n: int = 50) -> np.ndarray:
    """``n - 1`` evenly spaced necks in ``[0.02, 0.995]`` plus the Clifford neck."""
    return np.sort(np.append(np.linspace(0.02, 0.995, n - 1), CLIFFORD_R0))


def sweep_family(r0_grid, t_max: float = DEFAULT_T_MAX, tol: float = DEFAULT_TOL) -> SweepResult:
    """Free-boundary radius for every neck in ``r0_grid``; failures become status rows."""
    rows = []
    for r0 in np.sort(np.asarray(r0_grid, dtype=float)):
        try:
            R, tp = free_boundary_radius(float(r0), t_max, tol)
            rows.append(SweepRow(float(r0), R, tp, "ok"))
        except NoContactError:
            rows.append(SweepRow(float(r0), np.nan, np.nan, "no_contact"))
        except (SingularityError, StepFailure):
            rows.append(SweepRow(float(r0), np.nan, np.nan, "singular"))
        except (InconsistentContact, SignMismatch):
            rows.append(SweepRow(float(r0), np.nan, np.nan, "inconsistent"))
    ok = [row for row in rows if row.status == "ok"]
    if ok:
        best = max(ok, key=lambda row: row.R)
        R_bar, r0_bar = best.R, best.r0
    else:
        R_bar = r0_bar = np.nan
    return SweepResult(tuple(rows), R_bar, r0_bar, bool(R_bar > np.pi / 2))


def bracket_grid(n: int = 64) -> np.ndarray:
    """Necks in sweep order, from near the catenoid limit down to small necks."""
    gaps = np.geomspace(1.0 - NECK_BAND[1] + 1e-4, 1.0 - NECK_BAND[0] - 1e-4, n)
    return 1.0 - gaps


@lru_cache(maxsize=8)
def _bracket_scan(grid_size: int, t_max: float, tol: float):
    grid = bracket_grid(grid_size)
    R_vals = np.array([free_boundary_radius(a, t_max, tol)[0] for a in grid])
    grid.setflags(write=False)
    R_vals.setflags(write=False)
    return grid, R_vals


def solve_for_radius(
    R_target: float,
    branch: str = "pre",
    tol: float = DEFAULT_TOL,
    t_max: float = DEFAULT_T_MAX,
    grid_size: int = 64,
):
    """Find the neck whose free-boundary truncation has radius ``R_target``.

    The necks are scanned in decreasing order.  ``branch="pre"`` takes the
    first crossing (before the maximal radius), ``branch="post"`` the first
    crossing after the maximum.

    Returns:
        Tuple ``(profile, contact)``.

    Raises:
        NoContactError: If the target radius is not reached on the branch.
    """
    if branch not in ("pre", "post"):
        raise DomainError("branch must be 'pre' or 'post'")
    if abs(R_target - np.pi / 2) < 1e-13:
        profile = integrate_profile(CLIFFORD_R0, t_max, tol)
        return profile, find_free_boundary(profile)
    grid, R_vals = _bracket_scan(grid_size, t_max, tol)
    peak = int(np.argmax(R_vals))
    f = R_vals - R_target
    cross = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)[0]
    cross = cross[cross >= peak] if branch == "post" else cross[cross < peak]
    if cross.size == 0:
        raise NoContactError(f"radius {R_target} not reached on the {branch} branch")
    i = int(cross[0])
    lo, hi = sorted((grid[i], grid[i + 1]))
    r0 = brentq(
        lambda a: free_boundary_radius(a, t_max, tol)[0] - R_target, lo, hi, xtol=1e-15, rtol=1e-15
    )
    profile = integrate_profile(float(r0), t_max, tol)
    return profile, find_free_boundary(profile)


def critical_catenoid(n_t: int = 256, n_s: int = 32):
    """Free-boundary catenoid in the Euclidean unit ball (built in ``surface``)."""
    from .surface import build_catenoid

    return build_catenoid(n_t, n_s)
