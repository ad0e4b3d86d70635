class CapcoverError(Exception):
    """Base class for errors raised by capcover."""


class InstanceError(CapcoverError, ValueError):
    """Malformed or invalid instance data."""


class InfeasibleError(CapcoverError):
    """The instance (or an LP built from it) has no feasible solution."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnboundedError(CapcoverError):
    pass


class BudgetExceeded(CapcoverError):
    pass


class InvariantViolation(CapcoverError, AssertionError):
    """A property the rounding analysis guarantees was found broken at runtime."""
