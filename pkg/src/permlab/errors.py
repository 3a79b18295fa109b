"""Exception types shared across the package.

Everything derives from :class:`PermlabError`, so callers (notably the CLI)
can distinguish domain failures from programming errors with one except
clause.
"""

from __future__ import annotations


class PermlabError(ValueError):
    """Base class for all domain and configuration errors."""


class DomainError(PermlabError):
    """An argument violates an operation's mathematical precondition."""


class SignalTooShortError(DomainError):
    """A series or window cannot host a single (dim, delay) pattern.

    Carries ``min_length``, the smallest input length that would satisfy
    the precondition.
    """

    def __init__(self, message: str, min_length: int):
        super().__init__(message)
        self.min_length = min_length


class FramingError(DomainError):
    """A waveform's length is not aligned to whole symbol periods."""


class ConfigurationError(PermlabError):
    """An unknown scheme, kind, or method name was requested."""
