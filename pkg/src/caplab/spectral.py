"""Index forms of rotational annuli: Fourier-separated Robin eigenproblems and residuals.

On a rotational annulus with diagonal metric ``g_tt dt^2 + g_ss ds^2``,
the Fourier mode ``u(t) cos(k s)`` reduces either index form to a
Sturm-Liouville problem in ``t``:

    stiffness  int (g^tt u'^2 + k^2 g^ss u^2 - V u^2) sqrt(g) dt - c [sqrt(g_ss) u^2]_boundary
    mass       int u^2 sqrt(g) dt

with ``V = 2 kappa`` and ``c = ct_kappa(R)`` for ``QS``, and
``V = |A|^2 + 2 kappa`` and ``c = q`` for ``QA``.  The discretisation is
the standard second-order finite-element/finite-volume scheme on a
uniform grid with lumped trapezoid mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import AssemblyError, DomainError, TruncationError
from .lattice import LatticeSurface, d_s, d_t
from .sphere import conformal_dilation, ct_coefficient
from .surface import RotationalAnnulus

FORMS = ("QS", "QA")
ROTATIONS = {"e2e3": (2, 3), "e1e3": (1, 3), "e1e2": (1, 2)}
TRANSVERSE = ("e1e2", "e1e3")
REPORTED_EIGENVALUES = 16


def robin_coefficient(surface: RotationalAnnulus, form: str) -> float:
    """Boundary coefficient of the chosen index form.

    ``QS`` uses the geodesic curvature ``ct_kappa(R)`` of the barrier
    sphere; ``QA`` uses ``(1/sin gamma) k_S - cot(gamma) A(eta, eta)``
    with ``k_S = ct_kappa(R)`` for the umbilic barrier.
    """
    ct = ct_coefficient(surface.kappa, surface.R)
    if form == "QS":
        return ct
    if form == "QA":
        gam = surface.gamma
        aee = float(surface.A_tt[-1] / surface.g_tt[-1])
        return ct / np.sin(gam) - np.cos(gam) / np.sin(gam) * aee
    raise DomainError(f"unknown form {form!r}")


@dataclass(frozen=True)
class SpectralProblem:
    """A Fourier-truncated index form on a rotational annulus.

    Attributes:
        surface: Source annulus; its closed-form frame supplies coefficients.
        form: ``"QS"`` or ``"QA"``.
        kappa: Ambient curvature.
        robin_coeff: Boundary coefficient, shared by both boundary circles.
        mode_max: Fourier truncation ``K``.
        n_nodes: Number of grid nodes in ``t``.
    """

    surface: RotationalAnnulus
    form: str
    kappa: float
    robin_coeff: float
    mode_max: int = 8
    n_nodes: int = 256

    def __post_init__(self) -> None:
        if self.form not in FORMS:
            raise DomainError(f"form must be one of {FORMS}")
        if not np.isfinite(self.robin_coeff):
            raise DomainError("Robin coefficient must be finite")
        if self.mode_max < 0 or self.n_nodes < 8:
            raise DomainError("need mode_max >= 0 and n_nodes >= 8")

    def with_options(self, **kw) -> "SpectralProblem":
        opts = dict(mode_max=self.mode_max, n_nodes=self.n_nodes)
        opts.update(kw)
        return SpectralProblem(self.surface, self.form, self.kappa, self.robin_coeff, **opts)


def make_problem(
    surface: RotationalAnnulus, form: str = "QS", mode_max: int = 8, n_nodes: int = 256
) -> SpectralProblem:
    """Spectral problem with the form's natural Robin coefficient."""
    return SpectralProblem(
        surface, form, surface.kappa, robin_coefficient(surface, form), mode_max, n_nodes
    )


@dataclass(frozen=True)
class ModeOperator:
    """Discrete operator of one Fourier mode.

    Attributes:
        stiffness: Symmetric ``(n, n)`` matrix of the quadratic form.
        mass: Lumped mass weights.
        t: Grid nodes.
    """

    stiffness: np.ndarray
    mass: np.ndarray
    t: np.ndarray

    def tridiagonal(self):
        K, m = self.stiffness, 1.0 / np.sqrt(self.mass)
        return np.diag(K) * m * m, np.diag(K, 1) * m[:-1] * m[1:]


def _coefficients(problem: SpectralProblem, n: int):
    surf = problem.surface
    if surf.meta.get("metric_offdiag", 0.0) > 1e-10:
        raise AssemblyError("metric is not diagonal; modes do not separate")
    tb = surf.contact.t_plus
    t = np.linspace(-tb, tb, n)
    h = t[1] - t[0]
    sc = surf.frame.scalars(t)
    half = surf.frame.scalars(0.5 * (t[1:] + t[:-1]))
    return t, h, sc, half


def assemble(problem: SpectralProblem, k: int, n_nodes: int | None = None) -> ModeOperator:
    """Discrete stiffness matrix and lumped mass of Fourier mode ``k``.

    Raises:
        DomainError: If ``|k| > mode_max``.
        AssemblyError: If the metric is not diagonal.
    """
    if abs(k) > problem.mode_max:
        raise DomainError(f"mode {k} exceeds truncation {problem.mode_max}")
    n = n_nodes or problem.n_nodes
    t, h, sc, half = _coefficients(problem, n)
    p = np.sqrt(half.g_ss / half.g_tt)
    sq = np.sqrt(sc.g_tt * sc.g_ss)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    pot = 2 * problem.kappa
    if problem.form == "QA":
        pot = pot + (sc.A_tt / sc.g_tt) ** 2 + (sc.A_ss / sc.g_ss) ** 2
    diag = w * (k * k / sc.g_ss - pot) * sq
    diag[:-1] += p / h
    diag[1:] += p / h
    diag[0] -= problem.robin_coeff * np.sqrt(sc.g_ss[0])
    diag[-1] -= problem.robin_coeff * np.sqrt(sc.g_ss[-1])
    K = np.diag(diag) + np.diag(-p / h, 1) + np.diag(-p / h, -1)
    return ModeOperator(K, w * sq, t)


def mode_spectrum(problem: SpectralProblem, k: int, n_nodes: int | None = None, vectors=False):
    """Ascending eigenvalues (and mass-orthonormal eigenvectors) of mode ``k``."""
    op = assemble(problem, k, n_nodes)
    d, e = op.tridiagonal()
    if not vectors:
        return eigh_tridiagonal(d, e, eigvals_only=True)
    lam, V = eigh_tridiagonal(d, e)
    return lam, V / np.sqrt(op.mass)[:, None], op.t


@dataclass
class SpectralReport:
    """Aggregated index and nullity of a Fourier-truncated index form.

    Attributes:
        form: ``"QS"`` or ``"QA"``.
        kappa, R, gamma: Ambient curvature and contact data.
        modes: ``(k, eigenvalues)`` pairs, eigenvalues ascending.
        zero_tol: Threshold below which an eigenvalue may count as zero.
        ind: Number of negative eigenvalues (``k > 0`` counted twice).
        nul: Number of zero eigenvalues (same multiplicity rule).
        n_nodes: Grid size.
        refined: Eigenvalues of the same modes on the refined grid.
    """

    form: str
    kappa: float
    R: float
    gamma: float
    modes: list
    zero_tol: float
    ind: int
    nul: int
    n_nodes: int
    refined: list = field(default_factory=list, repr=False)

    @property
    def ind0(self) -> int:
        return self.ind + self.nul

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "kappa": self.kappa,
            "R": self.R,
            "gamma": self.gamma,
            "modes": [
                {"k": int(k), "eigenvalues": [float(v) for v in lam[:REPORTED_EIGENVALUES]]}
                for k, lam in self.modes
            ],
            "ind": self.ind,
            "nul": self.nul,
            "ind0": self.ind0,
            "zero_tol": self.zero_tol,
            "n_nodes": self.n_nodes,
        }


def default_zero_tol(problem: SpectralProblem) -> float:
    """``1e-3 * max(1, |lowest eigenvalue of mode 0|)``."""
    lam0 = mode_spectrum(problem, 0)[0]
    return 1e-3 * max(1.0, abs(lam0))


def choose_mode_max(problem: SpectralProblem, threshold: float = 1.0, limit: int = 256) -> int:
    """Smallest ``K`` whose lowest mode-``K`` eigenvalue exceeds ``threshold``."""
    k = 0
    while mode_spectrum(problem.with_options(mode_max=max(k, problem.mode_max)), k)[0] <= threshold:
        k += 1
        if k > limit:
            raise TruncationError("no Fourier truncation reaches a positive mode")
    return k


def index_nullity(problem: SpectralProblem, zero_tol: float | None = None) -> SpectralReport:
    """Count negative and zero eigenvalues over modes ``0..K``.

    An eigenvalue counts as zero when ``|lambda| < zero_tol`` and doubling
    the grid moves it towards 0 at first order or better: its magnitude at
    least halves, or both values already sit below the eigensolver
    roundoff bound ``n * eps * max|lambda|`` of the refined grid.

    Raises:
        TruncationError: If mode ``K`` still has an eigenvalue ``<= zero_tol``.
        AssemblyError: If the lowest eigenvalue decreases with ``|k|``.
    """
    tol = default_zero_tol(problem) if zero_tol is None else float(zero_tol)
    K, n = problem.mode_max, problem.n_nodes
    modes, refined = [], []
    ind = nul = 0
    prev = -np.inf
    for k in range(K + 1):
        lam = mode_spectrum(problem, k)
        lam2 = mode_spectrum(problem, k, 2 * n - 1)
        if lam[0] < prev - 1e-9 * max(1.0, abs(prev)):
            raise AssemblyError(f"lowest eigenvalue decreases at mode {k}")
        prev = lam[0]
        mult = 1 if k == 0 else 2
        floor = lam2.size * np.finfo(float).eps * np.abs(lam2).max()
        for j in np.nonzero(lam < tol)[0]:
            a, b = abs(lam[j]), abs(lam2[j])
            if a < tol and (b <= a / 2 or max(a, b) < floor):
                nul += mult
            elif lam[j] < 0:
                ind += mult
            else:
                raise AssemblyError(f"eigenvalue {lam[j]:.3e} of mode {k} is not resolved")
        modes.append((k, lam))
        refined.append((k, lam2))
    if modes[-1][1][0] <= tol:
        raise TruncationError(
            f"mode {K} still has eigenvalue {modes[-1][1][0]:.3e}; raise the truncation"
        )
    s = problem.surface
    return SpectralReport(problem.form, problem.kappa, s.R, s.gamma, modes, tol, ind, nul, n, refined)


def _row_laplacian(surface: RotationalAnnulus, u: np.ndarray) -> np.ndarray:
    """Conservative Laplacian on interior rows, closed-form metric at half nodes."""
    t, h = surface.t, surface.h
    half = surface.frame.scalars(0.5 * (t[1:] + t[:-1]))
    p = np.sqrt(half.g_ss / half.g_tt)[:, None]
    sq = np.sqrt(surface.g_tt * surface.g_ss)[1:-1, None]
    flux = p * (u[1:] - u[:-1]) / h
    lap_t = (flux[1:] - flux[:-1]) / h / sq
    lap_s = d_s(u, 2)[1:-1] / surface.g_ss[1:-1, None]
    return lap_t + lap_s


def _conormal(surface: RotationalAnnulus, u: np.ndarray):
    du = d_t(u, surface.h)
    sq = np.sqrt(surface.g_tt)
    return np.stack([-du[0] / sq[0], du[-1] / sq[-1]])


@dataclass(frozen=True)
class ResidualPair:
    interior: float
    boundary: float

    @property
    def max(self) -> float:
        return max(self.interior, self.boundary)


def coordinate_kernel_residual(surface: RotationalAnnulus, indices=None) -> ResidualPair:
    """Residuals of ``(Delta + 2 kappa) x_i = 0`` and ``d_eta x_i = ct(R) x_i``.

    Args:
        surface: Free-boundary rotational annulus.
        indices: Coordinates to test; defaults to those orthogonal to the
            cap centre (``1, 2, 3`` in S^3, ``0, 1, 2`` in R^3).
    """
    if indices is None:
        indices = (1, 2, 3) if surface.ambient == "sphere" else (0, 1, 2)
    ct = ct_coefficient(surface.kappa, surface.R)
    inner = bound = 0.0
    for i in indices:
        u = surface.points[..., i]
        r_in = _row_laplacian(surface, u) + 2 * surface.kappa * u[1:-1]
        r_bd = _conormal(surface, u) - ct * u[[0, -1]]
        inner, bound = max(inner, np.abs(r_in).max()), max(bound, np.abs(r_bd).max())
    return ResidualPair(float(inner), float(bound))


def killing_field(points: np.ndarray, generator) -> np.ndarray:
    """Rotation generator ``x_i e_j - x_j e_i`` evaluated at ``points``."""
    i, j = ROTATIONS[generator] if isinstance(generator, str) else generator
    K = np.zeros_like(points)
    K[..., j] = points[..., i]
    K[..., i] = -points[..., j]
    return K


def jacobi_residual(surface: RotationalAnnulus, generator) -> ResidualPair:
    """Residuals of the Jacobi equation for ``u = <K, nu>``.

    Interior: ``(Delta + |A|^2 + 2 kappa) u``.  Boundary: ``d_eta u - q u``
    with the ``QA`` Robin coefficient ``q``.
    """
    u = np.sum(killing_field(surface.points, generator) * surface.normals, axis=-1)
    pot = (surface.A_norm_sq + 2 * surface.kappa)[1:-1, None]
    r_in = _row_laplacian(surface, u) + pot * u[1:-1]
    q = robin_coefficient(surface, "QA")
    r_bd = _conormal(surface, u) - q * u[[0, -1]]
    return ResidualPair(float(np.abs(r_in).max()), float(np.abs(r_bd).max()))


def random_test_field(rng: np.random.Generator, t: np.ndarray, s: np.ndarray, m_max=3, k_max=2):
    """Random product of a polynomial in ``t`` and a trigonometric polynomial in ``s``."""
    tau = (t / np.abs(t).max())[:, None]
    u = np.zeros((t.size, s.size))
    for m in range(m_max + 1):
        for k in range(k_max + 1):
            c, ph = rng.standard_normal(), rng.uniform(0, 2 * np.pi)
            u += c * tau**m * np.cos(k * s[None, :] + ph)
    return u


def _radial_log_weight(R: float, rho):
    """``phi = log h_R`` and its first two derivatives in ``rho``."""
    cR = np.cos(R)
    base = 1 + cR * np.cos(rho)
    phi = -np.log(base)
    d1 = cR * np.sin(rho) / base
    d2 = (cR * np.cos(rho) + cR * cR) / base**2
    return phi, d1, d2


@dataclass
class WeightedOperatorSides:
    """Both sides of the conformal/weighted Jacobi identity on one lattice."""

    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.abs(self.lhs - self.rhs)[1:-1].max())


class WeightedOperatorCheck:
    """Jacobi operators of ``Phi_R(Sigma)`` in the conformal and the weighted pictures.

    ``Phi_R`` carries a free-boundary annulus in ``B_R`` onto an annulus in
    the hemisphere that is minimal for ``h_R^2 g`` and ``f``-minimal for the
    round metric with ``f = -2 log h_R``.  :meth:`sides` evaluates
    ``e^{-phi} Delta(e^phi u) + e^{2 phi}(|A~|^2 + Ric~(nu~, nu~)) u`` with
    the conformal-change formulas, and the weighted operator
    ``Delta u - g(grad f, grad u) + (|A|^2 + 2 + Hess f(nu, nu)) u``.
    """

    def __init__(self, surface: RotationalAnnulus, R: float | None = None, order: int = 4):
        self.R = surface.R if R is None else float(R)
        pts = conformal_dilation(self.R, surface.points)
        self.lat = LatticeSurface(surface.t, surface.s, pts, surface.normals, order)
        lat = self.lat
        x0 = lat.points[..., 0]
        rho = np.arccos(np.clip(x0, -1, 1))
        sin_rho = np.sin(rho)
        self.phi, d1, d2 = _radial_log_weight(self.R, rho)
        pair = -lat.normal[..., 0] / sin_rho  # <d_rho, nu>
        psi = d1 * pair  # normal derivative of phi
        cot = np.cos(rho) / sin_rho
        hess_nn = d2 * pair**2 + d1 * cot * (1 - pair**2)
        lap_amb = d2 + 2 * d1 * cot
        ric_conf = 2.0 - (hess_nn - psi**2) - (lap_amb + d1**2)
        e2 = np.exp(2 * self.phi)
        A2_conf = np.exp(-2 * self.phi) * (lat.A_norm_sq + 2 * psi * lat.H + 2 * psi**2)
        self.conf_potential = e2 * A2_conf + e2 * (np.exp(-2 * self.phi) * ric_conf)
        self.f = -2 * self.phi
        self.weighted_potential = lat.A_norm_sq + 2.0 - 2 * hess_nn

    def sides(self, u: np.ndarray) -> WeightedOperatorSides:
        lat, phi = self.lat, self.phi
        lhs = np.exp(-phi) * lat.laplacian(np.exp(phi) * u) + self.conf_potential * u
        rhs = lat.laplacian(u) - lat.gradient_pairing(self.f, u) + self.weighted_potential * u
        return WeightedOperatorSides(lhs, rhs)


def weighted_operator_check(
    surface: RotationalAnnulus,
    R: float | None = None,
    trials: int = 20,
    seed: int = 0,
    order: int = 4,
) -> float:
    """Largest interior residual of the conformal/weighted identity over random fields.

    Both sides are evaluated on the lattice of ``Phi_R(Sigma)`` with
    ``t``-stencils of the given order (4 by default).
    """
    chk = WeightedOperatorCheck(surface, R, order)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = random_test_field(rng, surface.t, surface.s)
        worst = max(worst, chk.sides(u).residual)
    return worst
