"""Exception hierarchy shared by every module."""


class GaussSepError(Exception):
    """Base class for all package errors."""


class ContractError(GaussSepError, ValueError):
    """An input violates the documented precondition of an operation."""


class NumericalError(GaussSepError, ArithmeticError):
    """A numerical routine failed to reach its accuracy contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularMatrixError(NumericalError):
    def __init__(self, message, det):
        super().__init__(message)
        self.det = det


class DomainError(ContractError):
    """Input outside the physical domain; ``margin`` carries the failing check."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class RepresentationError(ContractError):
    """The Gaussian P-function does not exist (or sits on its boundary)."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class NotFoundError(GaussSepError, RuntimeError):
    """A search exhausted its budget without a certified result."""
