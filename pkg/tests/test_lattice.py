import numpy as np
import pytest

from caplab.errors import DomainError
from caplab.lattice import LatticeSurface, cross4, d_s, d_t, d_tt


def _grid(n):
    t = np.linspace(-1, 1, n)
    return t, t[1] - t[0]


@pytest.mark.parametrize("order", [2, 4])
def test_d_t_convergence_order(order):
    errs = []
    for n in (81, 161):
        t, h = _grid(n)
        F = np.sin(2 * t)[:, None]
        errs.append(np.abs(d_t(F, h, order)[:, 0] - 2 * np.cos(2 * t)).max())
    assert np.log2(errs[0] / errs[1]) > order - 0.3


@pytest.mark.parametrize("order", [2, 4])
def test_d_tt_convergence_order(order):
    errs = []
    for n in (41, 81):
        t, h = _grid(n)
        F = np.sin(2 * t)[:, None]
        errs.append(np.abs(d_tt(F, h, order)[:, 0] + 4 * np.sin(2 * t)).max())
    assert np.log2(errs[0] / errs[1]) > order - 0.3


def test_stencils_exact_on_polynomials():
    t, h = _grid(11)
    F = (t**2)[:, None]
    assert np.abs(d_t(F, h)[:, 0] - 2 * t).max() < 1e-12
    F4 = (t**4)[:, None]
    assert np.abs(d_t(F4, h, 4)[:, 0] - 4 * t**3).max() < 1e-12
    assert np.abs(d_tt(F4, h, 4)[:, 0] - 12 * t**2).max() < 1e-11


def test_d_s_spectral():
    s = 2 * np.pi * np.arange(16) / 16
    F = np.cos(3 * s)[None, :]
    assert np.abs(d_s(F)[0] + 3 * np.sin(3 * s)).max() < 1e-13
    assert np.abs(d_s(F, 2)[0] + 9 * np.cos(3 * s)).max() < 1e-12


def test_cross4_orthogonal(rng):
    a, b, c = rng.standard_normal((3, 4))
    n = cross4(a, b, c)
    assert max(abs(n @ a), abs(n @ b), abs(n @ c)) < 1e-13
    assert n @ rng.standard_normal(4) != 0


def test_lattice_validation():
    t, s = np.linspace(0, 1, 8), np.linspace(0, 6, 4)
    with pytest.raises(DomainError):
        LatticeSurface(t, s, np.zeros((7, 4, 3)))
    with pytest.raises(DomainError):
        LatticeSurface(t[:5], s, np.zeros((5, 4, 3)))
    with pytest.raises(DomainError):
        LatticeSurface(t, s, np.zeros((8, 4, 3)), order=3)


def _unit_sphere_patch(n_t, order):
    # Euclidean unit sphere away from the poles; H = 2 and |A|^2 = 2.
    t = np.linspace(-1.0, 1.0, n_t)
    s = 2 * np.pi * np.arange(32) / 32
    T, S = np.meshgrid(t, s, indexing="ij")
    pts = np.stack([np.cos(T) * np.cos(S), np.cos(T) * np.sin(S), np.sin(T)], -1)
    return LatticeSurface(t, s, pts, pts, order)


@pytest.mark.parametrize("order", [2, 4])
def test_lattice_curvatures_of_round_sphere(order):
    lat = _unit_sphere_patch(129, order)
    assert np.abs(np.abs(lat.H) - 2).max() < 1e-3
    assert np.abs(lat.A_norm_sq - 2).max() < 1e-3


def test_lattice_laplacian_of_coordinate():
    # On the unit sphere Delta z = -2 z.
    lat = _unit_sphere_patch(257, 4)
    z = lat.points[..., 2]
    assert np.abs(lat.laplacian(z) + 2 * z)[2:-2].max() < 1e-6


def test_lattice_area():
    lat = _unit_sphere_patch(257, 2)
    exact = 4 * np.pi * np.sin(1.0)
    assert lat.integrate(np.ones(lat.points.shape[:2])) == pytest.approx(exact, rel=1e-4)
