"""Exception taxonomy shared across the package."""


class RecdagError(Exception):
    """Base class for all package errors."""


class DomainError(RecdagError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResourceError(RecdagError):
    """Allocation or traversal budget exceeded; message names the request."""


class UsageError(RecdagError, ValueError):
    """Inconsistent arguments at the API boundary."""


class ParseError(RecdagError):
    """Malformed persisted data; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class FormatVersionError(ParseError):
    """Persisted data written by a newer format version."""
