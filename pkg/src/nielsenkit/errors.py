"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates the documented preconditions of an operation."""


class InvalidQuotient(DomainError):
    """A finite quotient does not define a homomorphism of its presentation."""

    def __init__(self, message, relator=None):
        super().__init__(message)
        self.relator = relator


class BudgetExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured state budget."""
