class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class VerificationError(RuntimeError):
    """An identity or acceptance check did not meet its tolerance."""
