class CantorvalError(Exception):
    """Base class for all errors raised by the analyzer engines."""


class MalformedIntervalError(CantorvalError, ValueError):
    """An interval with lo > hi, or an interval set argument that breaks a precondition."""


class InvalidSeriesError(CantorvalError, ValueError):
    """A series description that cannot be parsed or violates the series invariants."""


class BudgetExceededError(CantorvalError, RuntimeError):
    """An enumeration would exceed the configured budget; the caller should reduce depth."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what} needs {needed} items, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class DisjointnessViolation(CantorvalError, ValueError):
    """Two pieces of a decomposition that should be disjoint intersect."""

    def __init__(self, first: str, second: str, overlap):
        super().__init__(f"pieces {first} and {second} intersect in {overlap}")
        self.first = first
        self.second = second
        self.overlap = overlap


class RootBracketError(CantorvalError, ValueError):
    """The Moran function does not change sign on the initial bracket."""
