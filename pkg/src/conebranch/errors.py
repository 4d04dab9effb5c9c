"""Exception hierarchy shared by all modules."""


class ConeBranchError(Exception):
    """Base class for library errors."""


class ConfigurationError(ConeBranchError):
    """Unsupported algebra family or size, or otherwise invalid setup."""


class DimensionError(ConeBranchError, ValueError):
    """Operands do not live in the same space."""


class ValidationError(ConeBranchError, ValueError):
    """Input data violates a structural invariant."""


class DivergenceError(ConeBranchError, ArithmeticError):
    """A gamma-type integral or factor is evaluated at or beyond a pole."""


class DomainError(ConeBranchError, ValueError):
    """A point lies outside the domain of a map (cone, X, positive half-line)."""


class ResonanceError(ConeBranchError, ZeroDivisionError):
    """The lifting recursion hits a vanishing denominator."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


class SamplingError(ConeBranchError, RuntimeError):
    """Rejection sampling accepts too few proposals."""


class IntegrabilityWarning(UserWarning):
    """A weight exponent is at or past the integrability threshold."""
