"""Exception hierarchy shared across the package."""


class DictLassoError(Exception):
    """Base class for all numerical/usage errors raised by this package."""


class AllZeroMatrix(DictLassoError):
    """Matrix has no singular value above the rank tolerance."""


class NotOrthonormal(DictLassoError):
    """Input columns fail the orthonormality check."""


class SingularGram(DictLassoError):
    """A Gram matrix (A'A) is numerically singular; typically n < p - r."""


class ZeroWeight(DictLassoError):
    """A dictionary weight that must be positive is zero."""


class SingularSubproblem(DictLassoError):
    """The cached linear system of an iterative solve is numerically singular."""


class BudgetExceeded(DictLassoError):
    """Exhaustive support enumeration was requested but exceeds the budget."""


class SchemaError(DictLassoError):
    """A configuration document violates the strict schema."""
