import numpy as np
import pytest

from caplab.conformal import (
    WarpedProfile,
    barrier_curvature,
    condition_A_eval,
    conformal_hypersurface_check,
    equatorial_disc,
    foliation_derivative,
    foliation_derivative_fd,
    half_clifford,
    killing_orthogonality,
    killing_orthogonality_series,
    push_to_model,
    random_profile,
    ricci_radial_gap,
    sphere_mean_curvature,
    sphere_model_profile,
    ua_identity_check,
)
from caplab.errors import DomainError, SignMismatch
from caplab.rotational import find_capillary_boundary, integrate_profile
from caplab.surface import build_annulus, normal_graph, random_neumann_field

import oracles


@pytest.mark.parametrize("kappa,rbar", [(1.0, 1.0), (0.0, 1.0), (-1.0, 0.9), (1.0, 3.0)])
@pytest.mark.parametrize("n", [2, 3])
def test_space_forms_identically_zero(kappa, rbar, n):
    rep = condition_A_eval(WarpedProfile.space_form(kappa, rbar, n))
    assert rep.verdict == "IdenticallyZero"
    assert np.abs(rep.values).max() < 1e-10


@pytest.mark.parametrize("n", [2, 3, 5])
def test_gaussian_value(n):
    rep = condition_A_eval(WarpedProfile.gaussian(n))
    assert rep.verdict == "StrictlyNegative"
    assert np.abs(rep.values - oracles.gaussian_condition(rep.r, n)).max() < 1e-12


def test_polynomial_verdicts():
    # phi = r^2 gives -4r, phi = r^4 changes sign.
    sq = condition_A_eval(WarpedProfile.polynomial([0, 0, 1]))
    assert sq.verdict == "StrictlyNegative"
    assert np.abs(sq.values + 4 * sq.r).max() < 1e-12
    assert condition_A_eval(WarpedProfile.polynomial([0, 0, 0, 0, 1])).verdict == "Mixed"
    with pytest.raises(DomainError):
        WarpedProfile.polynomial([0, 1, 1])


def test_hyperbolic_domain():
    with pytest.raises(DomainError):
        WarpedProfile.space_form(-1.0, rbar=1.0)


def test_ricci_gap_sign(rng):
    profiles = [WarpedProfile.space_form(1.0), WarpedProfile.gaussian(2),
                WarpedProfile.polynomial([0, 0, 0, 0, 1])] + [random_profile(rng) for _ in range(5)]
    for prof in profiles:
        gap = ricci_radial_gap(prof)
        cond = condition_A_eval(prof).values
        big = np.abs(cond) > 1e-10
        assert np.all(np.sign(gap.gap[big]) == -np.sign(cond[big]))
    assert np.abs(ricci_radial_gap(WarpedProfile.space_form(1.0)).gap).max() < 1e-10


def test_ricci_gap_needs_dimension():
    with pytest.raises(DomainError):
        ricci_radial_gap(WarpedProfile.gaussian(1))


def test_barrier_curvature_on_sphere():
    for R in (0.4, 1.0, 2.0):
        assert barrier_curvature(sphere_model_profile(), np.tan(R / 2)) == pytest.approx(1 / np.tan(R), abs=1e-13)


def test_ua_identity_on_clifford(clifford):
    for a in np.eye(3):
        assert ua_identity_check(clifford.with_resolution(64), a).max < 1e-4


def test_ua_identity_on_equatorial_disc():
    res = ua_identity_check(equatorial_disc([0, 0, 1], 1.0), [0, 0, 1])
    assert res.max < 1e-14


def test_push_to_model_requires_free_boundary():
    p = integrate_profile(0.6)
    s = build_annulus(p, find_capillary_boundary(p, 1.0), 64, 16)
    with pytest.raises(DomainError):
        push_to_model(s)


def test_foliation_negative_and_matches_fd(rng):
    prof = WarpedProfile.space_form(1.0)
    s, r = rng.uniform(0.01, 0.99, 50), rng.uniform(0, 1, 50)
    vals = foliation_derivative(1.0, prof, s, r)
    assert np.all(vals < 0)
    fd = np.array([foliation_derivative_fd(1.0, prof, a, b) for a, b in zip(s, r)])
    assert np.abs(fd - vals).max() < 1e-8


def test_foliation_domain():
    prof = WarpedProfile.space_form(1.0)
    with pytest.raises(DomainError):
        foliation_derivative(1.0, prof, 0.0, 0.5)
    with pytest.raises(DomainError):
        foliation_derivative(1.0, prof, 0.5, 1.5)


def test_foliation_mixed_profile_no_sign_check():
    prof = WarpedProfile.polynomial([0, 0, 0, 0, 8])
    vals = foliation_derivative(1.0, prof, np.full(5, 0.5), np.linspace(0, 1, 5))
    assert np.any(vals > 0)


def test_killing_orthogonality_unperturbed_is_zero():
    base = half_clifford(128)
    lat = normal_graph(base, random_neumann_field(np.random.default_rng(0), float(base.t[-1])).scaled(0.0))
    assert killing_orthogonality(lat, "e1e3", 0.98) < 1e-10


def test_killing_orthogonality_converges(rng):
    base = half_clifford(128)
    u = random_neumann_field(rng, float(base.t[-1]))
    c, f = killing_orthogonality_series(u, "e1e2", 0.98)
    assert f < 1e-4 and np.log2(c / f) > 1.9


@pytest.mark.parametrize("prof", [WarpedProfile.space_form(1.0), WarpedProfile.gaussian(2)])
def test_hypersurface_mean_curvature(prof):
    chk = conformal_hypersurface_check(0.5, prof)
    assert chk.residual < 1e-6
    assert chk.formula == sphere_mean_curvature(0.5, prof)
    with pytest.raises(DomainError):
        conformal_hypersurface_check(prof.rbar, prof)
