"""Exception hierarchy shared by all analysis modules.

Every error raised by the library derives from :class:`DdltiError`, so callers
(in particular the CLI) can distinguish library failures from genuine bugs.
"""


class DdltiError(Exception):
    """Base class for all library errors."""


# --- linear algebra ---------------------------------------------------------

class NonSquareError(DdltiError):
    """Matrix operation requires a square matrix."""


class RankDeficientError(DdltiError):
    """Right inverse requested for a matrix without full row rank."""


# --- systems and simulation -------------------------------------------------

class DimensionMismatchError(DdltiError):
    """Inconsistent matrix/vector dimensions."""


class NotSisoError(DdltiError):
    """Operation is defined for single-input single-output systems only."""


class NotObservableError(DdltiError):
    """State-space representation is not observable."""


class NotMinimalError(DdltiError):
    """State-space representation is not minimal (not controllable)."""


class NoVectorRelativeDegreeError(DdltiError):
    """System has no (vector) relative degree."""


class SingularGError(DdltiError):
    """Decoupling matrix does not have full row rank."""


class InfeasibleConstraintsError(DdltiError):
    """Random system constraints could not be met within the retry budget."""


# --- data and Hankel structures ---------------------------------------------

class WindowTooLongError(DdltiError):
    """Requested window length exceeds the available data."""


class IndexOutOfRangeError(DdltiError):
    """Channel index outside the valid range."""


class DataTooShortError(DdltiError):
    """Data sequence too short for the requested operation."""


class NotPersistentlyExcitingError(DdltiError):
    """Input data fails the required persistency-of-excitation order."""


class InfeasibleError(DdltiError):
    """No trajectory in the data span matches the requested constraints."""


class NotUniqueError(DdltiError):
    """Continuation is not uniquely determined by the data."""


class ContinuationNotUniqueError(DdltiError):
    """Zero-dynamics input continuation is not unique (window or tolerance issue)."""


class DimensionMismatchZdError(DdltiError):
    """Zero-dynamics dimension disagrees with the declared order and degrees."""


# --- continuous-time reconstruction ------------------------------------------

class ShellMismatchError(DdltiError):
    """Eigenvalue magnitude shells of the three discretizations are inconsistent."""


class NoBranchMatchError(DdltiError):
    """No logarithm branch within the search bound matches all sampling times."""


class AmbiguousBranchError(DdltiError):
    """Several logarithm branches match; sampling times too close to rational dependence."""


class DuplicateAliasError(DdltiError):
    """A repeated discrete eigenvalue de-aliases to distinct continuous ones."""


class DefectiveError(DdltiError):
    """Matrix is numerically defective (not diagonalizable)."""


class NearSingularIntegralError(DdltiError):
    """Hold integral is numerically singular (phi_1 of an eigenvalue near zero)."""


class ValidationFailedError(DdltiError):
    """Reconstructed system fails re-discretization validation."""


class RankDeficientHankelError(DdltiError):
    """Markov-parameter Hankel has lower rank than the declared order."""


class MarkovMismatchError(DdltiError):
    """Impulse responses of the datasets are mutually inconsistent."""


# --- CLI ----------------------------------------------------------------------

class ParseError(DdltiError):
    """Input file could not be parsed."""
