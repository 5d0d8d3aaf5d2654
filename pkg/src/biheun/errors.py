"""Exception types raised across the package."""


class BiheunError(Exception):
    """Base class for all package errors."""


class PoleError(BiheunError):
    """Argument sits on a pole of the gamma function."""


class DomainError(BiheunError):
    """Input lies outside the supported evaluation domain."""


class ConvergenceError(BiheunError):
    """A series or iteration did not reach its tolerance within the term cap."""


class DependenceError(BiheunError):
    """The requested second solution is linearly dependent on the first."""


class DegenerateLambda(BiheunError):
    """The Jimbo-Miwa parameter lambda is undefined because theta0 = 0."""


class CriterionError(BiheunError):
    """Neither termination criterion (e = 2N or c = -N) holds."""


class RootFindError(BiheunError):
    """Polynomial root finding failed."""


class NotAnEigenvalue(BiheunError):
    """The supplied d does not close the finite recursion."""


class RegionError(BiheunError):
    """The evaluation point lies outside the series convergence region."""


class PreconditionError(BiheunError):
    """A documented precondition of an operation is violated."""


class DivisionError(BiheunError):
    """A normalising denominator is numerically zero."""


class SingularGauge(BiheunError):
    """The off-diagonal entry a12 vanishes at the evaluation point."""


class SingularFrame(BiheunError):
    """A fundamental matrix or gauge matrix is numerically singular."""


class DegenerateData(BiheunError):
    """Connection data with u = 0 or yv = 0."""


class EvalError(BiheunError):
    """Evaluation of a solution failed."""
