"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid parameter or configuration value; names the offending field."""


class NumericalError(ArithmeticError):
    """A numerical guard tripped (orthonormality residual, overflow, NaN)."""


class TruncationError(NumericalError):
    """A requested truncation tolerance could not be met.

    Carries the tail mass that was actually achieved.
    """

    def __init__(self, message, achieved_tail=None):
        super().__init__(message)
        self.achieved_tail = achieved_tail
