"""Exception hierarchy shared by every caplab module."""


class CaplabError(Exception):
    """Base class for all caplab failures."""


class DomainError(CaplabError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class PoleError(DomainError):
    """A point sits on (or numerically at) the projection pole -e0."""


class RangeError(DomainError):
    """Evaluation requested outside the sampled parameter range."""


class SingularityError(CaplabError, ArithmeticError):
    """The rotational ODE left the admissible band 0 < r < 1."""


class StepFailure(CaplabError, ArithmeticError):
    """The adaptive integrator could not make progress."""


class NoContactError(CaplabError):
    """No free-boundary contact was found on the integrated range."""


class InconsistentContact(CaplabError):
    """Two independent contact-angle computations disagree."""


class SignMismatch(CaplabError):
    """A(eta, eta) has different signs on the two boundary circles."""


class DegenerateSlice(CaplabError):
    """Too many lattice nodes lie on the slicing plane."""


class ContactLost(CaplabError):
    """A perturbed surface no longer meets the barrier sphere."""


class DegenerateDual(CaplabError):
    """The dual cap radius is numerically 0 or pi."""


class UmbilicError(CaplabError):
    """|A| vanishes somewhere, so the polar dual is branched."""


class ProjectionDegenerate(CaplabError):
    """The projected Gauss map is undefined (nu parallel to e0)."""


class AssemblyError(CaplabError):
    """The spectral problem cannot be separated into Fourier modes."""


class TruncationError(CaplabError):
    """The Fourier truncation still carries non-positive eigenvalues."""
