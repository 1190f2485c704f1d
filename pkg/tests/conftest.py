import sys

import numpy as np
import pytest

from caplab.rotational import CLIFFORD_R0, default_sweep_grid, find_free_boundary, integrate_profile, sweep_family
from caplab.surface import build_annulus, build_catenoid


@pytest.fixture(scope="session")
def clifford_profile():
    return integrate_profile(CLIFFORD_R0)


@pytest.fixture(scope="session")
def clifford(clifford_profile):
    return build_annulus(clifford_profile, find_free_boundary(clifford_profile), 256, 32)


@pytest.fixture(scope="session")
def catenoid():
    return build_catenoid(256, 32)


@pytest.fixture(scope="session")
def moderate():
    """A free-boundary annulus with R near 1.1."""
    prof = integrate_profile(0.86)
    return build_annulus(prof, find_free_boundary(prof), 256, 32)


@pytest.fixture(scope="session")
def sweep50():
    return sweep_family(default_sweep_grid(50))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
