"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented precondition or integer-domain guard."""


class MemoryBudgetError(PreconditionError):
    """A requested occurrence table would exceed the configured memory budget."""
