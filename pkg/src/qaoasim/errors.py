"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """An ansatz/problem/optimizer combination that cannot be assembled."""


class ResourceLimitError(RuntimeError):
    """A request that would exceed a hard desk-scale budget (memory or enumeration size)."""


class ParseError(ValueError):
    """Malformed problem file; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UndefinedRatioError(ValueError):
    """Approximation ratio has a zero denominator (e.g. flat cost landscape)."""


class ObjectiveError(RuntimeError):
    """The optimization objective returned a non-finite value."""
