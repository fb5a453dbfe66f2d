"""Exception types shared across the package."""


class RegoError(Exception):
    """Base class for all errors raised by this package."""


class RankDeficient(RegoError):
    """A matrix that must have full row rank does not."""


class DimensionMismatch(RegoError, ValueError):
    pass


class UnknownProblem(RegoError, KeyError):
    pass


class DomainError(RegoError, ValueError):
    """Argument outside the domain of a closed-form quantity."""


class UndefinedExpectation(RegoError, ArithmeticError):
    """The requested moment does not exist for these parameters."""


class NumericalFailure(RegoError, ArithmeticError):
    pass
