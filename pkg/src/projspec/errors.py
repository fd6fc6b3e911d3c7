"""Exception types shared across the package.

Every failure raised by this package derives from :class:`ProjspecError`,
so callers (and the CLI) can separate numeric/contract failures from
ordinary Python errors.
"""


class ProjspecError(Exception):
    """Base class for all contract and numeric failures raised here."""


class DimensionMismatchError(ProjspecError):
    """Matrix shapes are incompatible with the requested operation."""


class ArityMismatchError(ProjspecError):
    """A point or coefficient vector has the wrong number of variables."""


class NotNormalError(ProjspecError):
    """A matrix required to be normal fails the commutator-with-adjoint test."""


class NotCommutingError(ProjspecError):
    """A tuple required to commute has a pairwise commutator above tolerance."""


class NoConvergenceError(ProjspecError):
    """An iterative spectral kernel failed to converge."""


class GridTooLargeError(ProjspecError):
    """The interpolation grid would exceed the configured evaluation cap."""


class DegenerateLeadingCoefficientError(ProjspecError):
    """Leading coefficient too small relative to the rest; degree dropped."""


class DegenerateDirectionsError(ProjspecError):
    """Every sampled direction dropped the degree of the restriction."""


class ContinuationCollisionError(ProjspecError):
    """Root paths could not be disambiguated at the minimum step size."""


class NotDiagonalError(ProjspecError):
    pass


class NotReducibleError(ProjspecError):
    pass


class ZeroNormalError(ProjspecError):
    """A hyperplane normal vector is zero."""


class SingularTransformError(ProjspecError):
    """A change-of-variables matrix is singular or too ill-conditioned."""


class NoSharedVectorError(ProjspecError):
    """No vector satisfied the joint eigenvector residual bounds."""


class ContourThroughSpectrumError(ProjspecError):
    """A quadrature node sits too close to the spectrum for the resolvent."""


class RankMismatchError(ProjspecError):
    """Projection trace is far from an integer rank."""


class MultiplicityRegimeError(ProjspecError):
    """Eigenvalue multiplicity incompatible with the requested perturbation mode."""


class TrackingLostError(ProjspecError):
    """A perturbed eigenvalue or root could not be matched to its source."""


class SingularPointError(ProjspecError):
    """The requested base point is a singular point of the spectral variety."""


class DerivativeMismatchError(ProjspecError):
    """Analytic and finite-difference derivative estimates disagree."""


class DocumentError(ProjspecError):
    """Malformed tuple document or generator parameters (input layer)."""
