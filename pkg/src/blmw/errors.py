"""Exception and warning types raised by the solver."""


class InvalidParamsError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


class NonDyadicError(ValueError):
    """Raised when a length or cell count is not a power of two."""


class DomainError(ValueError):
    pass


class NoTangentError(RuntimeError):
    """The Welge tangent equation has no sign change on the admissible interval."""


class NonFiniteStateError(FloatingPointError):
    pass


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry when known."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class BoundViolationWarning(RuntimeWarning):
    """A cell average left the admissible saturation interval (CFL breach)."""
