"""Numerical toolkit for joint point spectra of complex matrix tuples.

Computes multivariate characteristic polynomials of operator tuples,
decides complete reducibility into linear factors, samples joint spectra,
and verifies the commutativity/normality equivalences and first-order
perturbation formulas for normal matrices.
"""

from .config import Config
from .errors import (
    ArityMismatchError,
    ContinuationCollisionError,
    ContourThroughSpectrumError,
    DegenerateDirectionsError,
    DegenerateLeadingCoefficientError,
    DerivativeMismatchError,
    DimensionMismatchError,
    DocumentError,
    GridTooLargeError,
    MultiplicityRegimeError,
    NoConvergenceError,
    NoSharedVectorError,
    NotCommutingError,
    NotDiagonalError,
    NotNormalError,
    NotReducibleError,
    ProjspecError,
    RankMismatchError,
    SingularPointError,
    SingularTransformError,
    TrackingLostError,
    ZeroNormalError,
)
from .linalg import (
    EigenCluster,
    OperatorTuple,
    SpectralDecomposition,
    as_complex_matrix,
    commutator_norm,
    determinant,
    eig_normal,
    is_normal,
    is_selfadjoint,
    operator_norm,
    smallest_singular_value,
)
from .poly import MultiPoly, UnivariateRoots, charpoly, restrict_to_line, roots
from .factor import (
    DEGENERATE,
    NOT_REDUCIBLE,
    REDUCIBLE,
    Factor,
    Hyperplane,
    LinearFactorization,
    TwoByTwoReport,
    factor_linear,
    factors_to_hyperplanes,
    reducible_2x2,
)
from .spectra import (
    OFF_VARIETY,
    REGULAR,
    SINGULAR,
    ChangeOfBasis,
    CurveSample,
    HyperplaneReport,
    SpectrumPoint,
    classify_point,
    hyperplane_membership,
    membership,
    sample_curve,
    transform_tuple,
)
from .commute import (
    CompleteCommutativityReport,
    EquivalenceReport,
    JointDiagonalization,
    NormalityReport,
    SharedEigenvector,
    complete_commutativity_test,
    equivalence_report,
    normality_test,
    shared_eigenvector,
    simultaneous_diagonalize,
)
from .perturb import (
    ContourSpec,
    ExpansionCheck,
    PerturbationProbe,
    RieszProjection,
    eigenvalue_derivative,
    first_order_projection_term,
    projection_expansion_check,
    riesz_projection,
    separation_contour,
    tangent_mu,
)

__version__ = "0.1.0"
