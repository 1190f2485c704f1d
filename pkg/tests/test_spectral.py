import numpy as np
import pytest

from caplab.errors import DomainError, TruncationError
from caplab.spectral import (
    REPORTED_EIGENVALUES,
    TRANSVERSE,
    assemble,
    choose_mode_max,
    coordinate_kernel_residual,
    index_nullity,
    jacobi_residual,
    killing_field,
    make_problem,
    mode_spectrum,
    robin_coefficient,
    weighted_operator_check,
)

import oracles


def test_robin_coefficients(clifford, moderate):
    assert robin_coefficient(clifford, "QS") == pytest.approx(0.0, abs=1e-12)
    assert robin_coefficient(moderate, "QS") == pytest.approx(1 / np.tan(moderate.R))
    # At a right angle both forms share the coefficient.
    assert robin_coefficient(moderate, "QA") == pytest.approx(robin_coefficient(moderate, "QS"))
    with pytest.raises(DomainError):
        robin_coefficient(moderate, "QX")


@pytest.mark.parametrize("name", ["clifford", "catenoid"])
def test_qs_index_and_nullity(name, request):
    rep = index_nullity(make_problem(request.getfixturevalue(name), "QS", 8, 256))
    assert (rep.ind, rep.nul, rep.ind0) == (oracles.IND_QS, oracles.NUL_QS, oracles.IND0_QS)
    d = rep.to_dict()
    assert all(len(m["eigenvalues"]) <= REPORTED_EIGENVALUES for m in d["modes"])


def test_truncation_too_small(clifford):
    with pytest.raises(TruncationError):
        index_nullity(make_problem(clifford, "QS", 1, 128))


def test_mode_bounds(clifford):
    pr = make_problem(clifford, "QS", 2, 64)
    with pytest.raises(DomainError):
        assemble(pr, 3)
    with pytest.raises(DomainError):
        make_problem(clifford, "QZ")


def test_lowest_mode_zero_eigenvector_even_single_signed(clifford):
    lam, V, t = mode_spectrum(make_problem(clifford, "QS", 2, 129), 0, vectors=True)
    v = V[:, 0]
    assert lam[0] < 0
    assert np.all(v > 0) or np.all(v < 0)
    assert np.abs(v - v[::-1]).max() < 1e-10 * np.abs(v).max()


def test_eigenvectors_mass_orthonormal(moderate):
    pr = make_problem(moderate, "QS", 2, 65)
    lam, V, _ = mode_spectrum(pr, 1, vectors=True)
    M = assemble(pr, 1).mass
    G = V.T @ (M[:, None] * V)
    assert np.abs(G - np.eye(G.shape[0])).max() < 1e-10


def test_choose_mode_max(clifford):
    K = choose_mode_max(make_problem(clifford, "QS", 2, 128))
    assert K >= 2
    assert mode_spectrum(make_problem(clifford, "QS", K, 128), K)[0] > 1.0


def test_coordinate_kernel_converges(moderate):
    r = [coordinate_kernel_residual(moderate.with_resolution(n)).max for n in (128, 256)]
    assert r[1] < 1e-4 and np.log2(r[0] / r[1]) > 1.9


def test_catenoid_kernel(catenoid):
    assert coordinate_kernel_residual(catenoid).max < 1e-3


@pytest.mark.parametrize("gen", TRANSVERSE)
def test_jacobi_fields_from_rotations(moderate, gen):
    r = [jacobi_residual(moderate.with_resolution(n), gen).max for n in (128, 256)]
    assert r[1] < 1e-3 and np.log2(r[0] / r[1]) > 1.9


def test_axial_rotation_normal_component_vanishes(moderate):
    u = np.sum(killing_field(moderate.points, "e2e3") * moderate.normals, axis=-1)
    assert np.abs(u).max() < 1e-14


def test_weighted_identity_hemisphere_exact(clifford):
    assert weighted_operator_check(clifford, trials=3) < 1e-12


def test_weighted_identity_moderate(moderate):
    assert weighted_operator_check(moderate, trials=3) < 1e-4
