import numpy as np
import pytest

from caplab.errors import DomainError, NoContactError, RangeError, SingularityError
from caplab.rotational import (
    CLIFFORD_R0,
    NECK_BAND,
    bracket_grid,
    default_sweep_grid,
    embed,
    find_capillary_boundary,
    find_free_boundary,
    integrate_profile,
    nu0,
    nu0_dt,
    ode_residual,
    solve_for_radius,
)
from caplab.sphere import SpherePoint

import oracles


def test_clifford_profile_is_constant(clifford_profile):
    r, rp = clifford_profile.evaluate(np.linspace(-2, 2, 11))
    assert np.all(r == CLIFFORD_R0) and np.all(rp == 0)


def test_clifford_free_boundary(clifford_profile):
    c = find_free_boundary(clifford_profile)
    assert c.t_plus == pytest.approx(oracles.CLIFFORD_T_PLUS, abs=1e-14)
    assert c.params.R == pytest.approx(oracles.CLIFFORD_R, abs=1e-12)
    assert c.params.gamma == np.pi / 2 and c.kind == "free"


@pytest.mark.parametrize("r0", [0.0, 1.0, -0.1])
def test_neck_outside_unit_interval(r0):
    with pytest.raises(DomainError):
        integrate_profile(r0)


@pytest.mark.parametrize("r0", [NECK_BAND[0] / 2, 0.999])
def test_neck_in_singular_band(r0):
    with pytest.raises(SingularityError):
        integrate_profile(r0)


def test_tolerance_range():
    with pytest.raises(DomainError):
        integrate_profile(0.5, tol=1e-3)


def test_profile_is_even():
    p = integrate_profile(0.6)
    t = np.linspace(0, 2.5, 7)
    r1, rp1 = p.evaluate(t)
    r2, rp2 = p.evaluate(-t)
    assert np.array_equal(r1, r2) and np.array_equal(rp1, -rp2)
    with pytest.raises(RangeError):
        p.evaluate(p.t_max + 0.1)


def test_ode_residual_small():
    p = integrate_profile(0.6)
    assert np.abs(ode_residual(p, np.linspace(-2.5, 2.5, 41))).max() < 1e-6


def test_embedding_on_sphere():
    p = integrate_profile(0.6)
    x = embed(p, np.linspace(0, 6, 5)[:, None], np.linspace(-1, 1, 7)[None, :])
    assert np.abs(np.linalg.norm(x, axis=-1) - 1).max() < 1e-15
    assert isinstance(embed(p, 0.0, 0.3), SpherePoint)


def test_nu0_dt_matches_difference():
    p = integrate_profile(0.8)
    t, h = np.linspace(-1, 1, 9), 1e-6
    fd = (nu0(p, t + h) - nu0(p, t - h)) / (2 * h)
    assert np.abs(fd - nu0_dt(p, t)).max() < 1e-8


@pytest.mark.parametrize("key", list(oracles.T_PLUS))
def test_free_boundary_against_independent_oracle(key):
    p = integrate_profile(oracles.NECKS[key])
    c = find_free_boundary(p)
    assert c.params.R == pytest.approx(key[0], abs=1e-11)
    assert c.t_plus == pytest.approx(oracles.T_PLUS[key], abs=1e-11)
    assert c.diagnostics["nu0_residual"] < 1e-12


@pytest.mark.parametrize("key", list(oracles.NECKS))
def test_solve_for_radius_finds_oracle_neck(key):
    R, branch = key
    p, c = solve_for_radius(R, branch)
    assert p.r0 == pytest.approx(oracles.NECKS[key], abs=1e-10)
    assert c.params.R == pytest.approx(R, abs=1e-12)


def test_solve_for_radius_unreachable():
    with pytest.raises(NoContactError):
        solve_for_radius(2.5)
    with pytest.raises(DomainError):
        solve_for_radius(1.0, branch="middle")


def test_capillary_truncation_angle():
    p = integrate_profile(0.6)
    c = find_capillary_boundary(p, 1.0)
    assert c.kind == "capillary" and 0 < c.params.gamma < np.pi / 2
    # The angle is fixed by <eta, d_rho> = sin(gamma) and <nu, d_rho> = cos(gamma).
    assert abs(np.sin(c.params.gamma) - c.diagnostics["eta_drho"]) < 1e-12
    assert abs(np.cos(c.params.gamma) - c.diagnostics["nu_drho"]) < 1e-12
    with pytest.raises(RangeError):
        find_capillary_boundary(p, 10.0)


def test_capillary_at_free_boundary_recovers_right_angle():
    p = integrate_profile(0.6)
    free = find_free_boundary(p)
    cap = find_capillary_boundary(p, free.t_plus)
    assert cap.params.gamma == pytest.approx(np.pi / 2, abs=1e-8)
    assert cap.params.R == pytest.approx(free.params.R, abs=1e-14)


def test_sweep_rows_and_maximum(sweep50):
    assert len(sweep50.rows) == 50
    assert all(r.status == "ok" for r in sweep50.rows)
    r0 = [r.r0 for r in sweep50.rows]
    assert r0 == sorted(r0) and CLIFFORD_R0 in r0
    assert sweep50.exceeds_half_pi


def test_grids():
    g = default_sweep_grid(10)
    assert g.size == 10 and g[0] == 0.02
    b = bracket_grid(16)
    assert np.all(np.diff(b) < 0) and NECK_BAND[0] < b.min() and b.max() < NECK_BAND[1]
