"""Exception types shared across the package."""


class MonophiError(Exception):
    """Base class for all package-specific errors."""


class CompositionError(MonophiError):
    """Objects of two processes do not match up (domain errors in the algebra)."""


class ValidationError(MonophiError):
    """A value violates one of its structural invariants."""


class UnsupportedOperationError(MonophiError):
    """The requested operation is not defined for this backend."""


class ResourceLimitError(MonophiError):
    """Exhaustive search refused because the system exceeds the size limit."""
