import numpy as np
import pytest

from caplab.dual import double_dual_check, dual_params, dual_surface, projected_gauss_map
from caplab.errors import DegenerateDual, DomainError
from caplab.sphere import CapParams


def _expected(R, gam, eps):
    # Restated by hand: cos R~ = -eps sin R cos gamma, sin gamma~ sin R~ = sin R sin gamma.
    Rt = np.arccos(-eps * np.sin(R) * np.cos(gam))
    return Rt, np.arcsin(np.sin(R) * np.sin(gam) / np.sin(Rt))


@pytest.mark.parametrize("R,gam,eps", [(0.7, np.pi / 2, 1), (1.2, 0.9, 1), (2.0, 0.6, -1), (np.pi / 2, 0.4, 1)])
def test_dual_params_formula_and_round_trip(R, gam, eps):
    p = CapParams(R, gam, eps)
    d = dual_params(p)
    Rt, gt = _expected(R, gam, eps)
    assert d.R == pytest.approx(Rt, abs=1e-14) and d.gamma == pytest.approx(gt, abs=1e-14)
    back = dual_params(d)
    assert abs(back.R - R) < 1e-12 and abs(back.gamma - gam) < 1e-12


def test_free_boundary_dual_lies_in_hemisphere():
    d = dual_params(CapParams(0.9, np.pi / 2, 1))
    assert d.R == pytest.approx(np.pi / 2, abs=1e-15)
    assert d.gamma == pytest.approx(0.9, abs=1e-14)


def test_degenerate_dual():
    with pytest.raises(DegenerateDual):
        dual_params(CapParams(np.pi / 2, 1e-13, 1))


def test_dual_surface_relations(moderate):
    d = dual_surface(moderate)
    assert np.abs(np.linalg.norm(d.points, axis=-1) - 1).max() < 1e-14
    assert d.meta["metric_relation"] < 1e-12
    assert d.meta["A_tilde_vs_A"] < 1e-12
    assert d.meta["boundary_x0"] < 1e-12
    assert d.measured_radius() == pytest.approx(d.dual_params.R, abs=1e-10)
    assert d.measured_contact_angle() == pytest.approx(d.dual_params.gamma, abs=1e-8)


def test_double_dual(moderate):
    rep = double_dual_check(dual_surface(moderate))
    assert rep.distance < 1e-10 and rep.psi_product < 1e-10


def test_clifford_self_dual(clifford):
    d = dual_surface(clifford)
    assert d.dual_params.R == pytest.approx(np.pi / 2, abs=1e-12)
    assert d.dual_params.gamma == pytest.approx(np.pi / 2, abs=1e-8)


def test_dual_of_euclidean_surface_rejected(catenoid):
    with pytest.raises(DomainError):
        dual_surface(catenoid)


def test_projected_gauss_map(moderate, clifford):
    rep = projected_gauss_map(moderate)
    assert np.abs(np.linalg.norm(rep.n, axis=-1) - 1).max() < 1e-14
    assert rep.min_abs_det > 0
    with pytest.raises(DomainError):
        projected_gauss_map(clifford)
