"""Shared exception types."""


class ConfigError(ValueError):
    """Raised when user-supplied configuration fails validation."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot produce a trustworthy result."""
