"""Exception types shared across the package."""


class ClassTwoError(Exception):
    pass


class NotPrimeError(ClassTwoError, ValueError):
    pass


class EvenPrimeError(NotPrimeError):
    pass


class SingularMatrixError(ClassTwoError, ArithmeticError):
    pass


class BudgetExceeded(ClassTwoError):
    """A search or enumeration would exceed its configured cap."""


class ZeroVectorError(ClassTwoError, ValueError):
    pass


class SpanDeficientError(ClassTwoError, ValueError):
    pass


class RankMismatchError(ClassTwoError, ValueError):
    pass


class UnknownNameError(ClassTwoError, KeyError):
    pass


class UnknownFactorError(ClassTwoError):
    pass


class FdgError(ClassTwoError, ValueError):
    """Rejection of a ``.fdg`` document; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FdgSyntaxError(FdgError):
    pass


class DuplicateEdgeError(FdgError):
    pass


class IndexOutOfRangeError(FdgError):
    pass


class ZeroFlowError(FdgError):
    pass


class FdgNotPrimeError(FdgError, NotPrimeError):
    pass


class FdgEvenPrimeError(FdgNotPrimeError, EvenPrimeError):
    pass
