"""Exceptions raised by the poincare_relations package."""


class PoincareRelationsError(Exception):
    """Base exception for poincare_relations errors."""


class InvalidWeightError(PoincareRelationsError, ValueError):
    """Raised when a weight, level or modulus violates its constraints."""


class TruncationError(PoincareRelationsError):
    """Raised when a q-series coefficient beyond its truncation is requested."""


class UnreachableTolerance(PoincareRelationsError):  # noqa: N818
    """Raised when a coefficient cannot be certified to the requested error."""


class InvalidRelationError(PoincareRelationsError, ValueError):
    """Raised for malformed relations or unsupported exact relation requests."""


class ConfigurationError(PoincareRelationsError):
    """Raised when a run configuration fails validation."""


class InvalidSeriesError(PoincareRelationsError, ValueError):
    """Raised for malformed q-series or principal part data."""
