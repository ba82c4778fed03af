"""Exception types shared across the package."""

__all__ = ["ConfigError", "GraphError", "FitError"]


class ConfigError(ValueError):
    """Raised for malformed, unknown, or inconsistent configuration input."""


class GraphError(ValueError):
    """Raised for invalid graph operations or failed graph generation."""


class FitError(ValueError):
    """Raised when a power-law tail fit cannot be performed."""
