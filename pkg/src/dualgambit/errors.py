"""Exception hierarchy shared by the solver modules."""


class DualGambitError(Exception):
    """Base class for all package errors."""


class NotPositiveDefinite(DualGambitError, ValueError):
    """Cholesky factorization hit a nonpositive pivot.

    ``pivot`` is the 1-based index of the failing pivot.
    """

    def __init__(self, pivot, message=None):
        self.pivot = pivot
        super().__init__(message or f"matrix is not positive definite (pivot {pivot})")


class NotInterior(DualGambitError, ValueError):
    """A point lies outside the interior of its cone."""


class SingularHessian(DualGambitError):
    """The Newton system of the dual barrier could not be factorized."""


class SingularProjection(DualGambitError):
    """The projected Gram matrix ``A H^{-1} A*`` is singular."""


class CenteringError(DualGambitError):
    """Initial centering did not reach the required proximity."""


class ParseError(DualGambitError, ValueError):
    """Malformed problem file."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(DualGambitError, ValueError):
    """Problem data is inconsistent."""
