"""
Exception classes for zeta-boundary-terms.
"""

from typing import Optional


class ZetaBoundaryError(Exception):
    """Base exception class for zeta-boundary-terms errors."""

    pass


class ValidationError(ZetaBoundaryError):
    """Raised when an input value fails validation."""

    pass


class ConfigError(ValidationError):
    """Raised when a run configuration or curve description is incomplete."""

    pass


class UsageError(ValidationError):
    """Raised when operations are combined in an unsupported way."""

    pass


class DomainError(ZetaBoundaryError):
    """Raised when an argument lies outside the mathematical domain."""

    pass


class PrecisionError(ZetaBoundaryError):
    """Raised when the accuracy budget cannot be met."""

    pass


class BoundError(ZetaBoundaryError):
    """Raised when a configured size bound is exceeded."""

    pass


class InvalidFactorError(ZetaBoundaryError):
    """Raised when an Euler factor does not have constant term 1."""

    pass


class RequiresOverrideError(ZetaBoundaryError):
    """Raised when a bad prime needs an explicit a_p override."""

    pass


class DegenerateProductError(ZetaBoundaryError):
    """Raised when a partial Euler product vanishes."""

    pass


class NonnegativityError(ZetaBoundaryError):
    """Raised when a coefficient series that must be nonnegative is not."""

    def __init__(self, message: str, index: int, prime: Optional[int] = None, value: float = 0.0):
        super().__init__(message)
        self.index = index
        self.prime = prime
        self.value = value


class VerificationError(ZetaBoundaryError):
    """Raised when an acceptance criterion fails."""

    pass
