"""Exception hierarchy shared by all kronsum modules."""


class KronSumError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(KronSumError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class PreconditionError(KronSumError, ValueError):
    """An input violates a documented precondition (e.g. not Hermitian)."""


class ConvergenceError(KronSumError, RuntimeError):
    """An iterative factorisation hit its iteration cap."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SingularityError(KronSumError, ZeroDivisionError):
    """A sum of eigenvalues, one per factor, vanishes.

    ``witness`` holds the zero-based index tuple of the offending
    combination and ``value`` the offending sum.
    """

    def __init__(self, message, witness, value):
        super().__init__(message)
        self.witness = tuple(witness)
        self.value = value


class SingularMatrixError(KronSumError, ZeroDivisionError):
    """Dense LU met a pivot that is zero to working precision."""


class CapacityError(KronSumError, MemoryError):
    """A dense oracle solve was requested above the size guard."""


class UndefinedMetricError(KronSumError, ValueError):
    """A relative error was requested against a zero reference."""
