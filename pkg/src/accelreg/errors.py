"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DataError(ValueError):
    """Malformed input data (missing cells, non-finite features, bad shapes)."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NumericError(ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class FilterOverflowError(NumericError):
    """A filter recursion produced a non-finite value."""

    def __init__(self, t, sigma):
        super().__init__(f"non-finite filter value at t={t}, sigma={sigma!r}")
        self.t = t
        self.sigma = sigma


class StepSizeError(NumericError):
    """An iteration diverged, usually because the step size is too large."""
