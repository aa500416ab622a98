"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """An enumeration or computation exceeded its configured budget."""


class TruncationError(RuntimeError):
    """A truncated computation lost more mass than the configured threshold."""


class DimensionError(ValueError):
    """A target space is too small for the requested construction."""


class NearSingularGramError(RuntimeError):
    """Gram matrix is numerically singular; cutoff too aggressive or n too small."""
