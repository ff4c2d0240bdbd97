"""Exception hierarchy shared by all modules."""


class AlphaDPError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AlphaDPError, ValueError):
    """An argument lies outside the domain of the operation."""


class AbsoluteContinuityViolation(DomainError):
    """p puts mass where q has none, so p is not absolutely continuous w.r.t. q."""


class DimensionMismatch(DomainError):
    """Distributions or channel matrices have incompatible shapes."""


class NumericOverflow(AlphaDPError, OverflowError):
    """The result is not representable as a finite double."""


class QuadratureDivergence(AlphaDPError, ArithmeticError):
    """Numerical integration did not converge (or the integral is infinite)."""


class GroupTooLarge(DomainError):
    """Group privacy needs alpha > 2**k."""


class NoFeasibleAlpha(AlphaDPError):
    """Every alpha on the search grid overflowed."""


class NoFeasibleSigma(AlphaDPError):
    """No (alpha, sigma) grid point meets the epsilon bound."""
