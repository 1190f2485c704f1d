"""caplab: rotational capillary minimal annuli in spherical caps, their duals and spectra."""

from .errors import CaplabError
from .rotational import (
    CLIFFORD_R0,
    find_capillary_boundary,
    find_free_boundary,
    integrate_profile,
    solve_for_radius,
    sweep_family,
)
from .sphere import CapParams, SpherePoint
from .surface import build_annulus, build_catenoid

__version__ = "0.1.0"

__all__ = [
    "CLIFFORD_R0",
    "CapParams",
    "CaplabError",
    "SpherePoint",
    "build_annulus",
    "build_catenoid",
    "find_capillary_boundary",
    "find_free_boundary",
    "integrate_profile",
    "solve_for_radius",
    "sweep_family",
]
