"""
Error types for hypchroma
"""


class HypChromaError(Exception):
    """Base class for every error raised by hypchroma."""


class DomainError(HypChromaError, ValueError):
    """Input outside the domain of a geometric formula."""


class ParameterError(HypChromaError, ValueError):
    """Parameters outside the range an operation supports."""


class SizeLimitError(ParameterError):
    """A finite structure would exceed the configured vertex cap."""


class ConstructionError(HypChromaError):
    """A construction produced an inconsistent result."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(HypChromaError):
    """Invalid environment configuration."""
