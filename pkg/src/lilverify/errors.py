"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimitError(RuntimeError):
    """An exponential kernel refused an instance beyond its hard-coded limit."""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class DegenerateDistributionError(ValueError):
    """A sample has zero variance, so normalization is undefined."""


class ZeroCountError(ArithmeticError):
    """A log-scale statistic was requested for a zero count."""
