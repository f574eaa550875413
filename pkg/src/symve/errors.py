"""Exception hierarchy shared across the package."""


class SVEError(Exception):
    """Base class for every error raised by symve."""


class DomainError(SVEError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class UndefinedEffectError(DomainError):
    """The effect measure is 0/0 or otherwise undefined for the given data."""


class BoundaryError(DomainError):
    """A point estimate sits on +/-1 where atanh-based inference diverges."""


class NumericError(SVEError, ArithmeticError):
    """A numeric routine failed to converge or produced an inconsistent value."""

    def __init__(self, message, **diagnostics):
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in sorted(diagnostics.items()))
            message = f"{message} ({detail})"
        super().__init__(message)
        self.diagnostics = diagnostics


class BracketError(NumericError):
    """Root finding was called on an interval without a sign change."""


class ConfigError(SVEError, ValueError):
    """A simulation configuration is malformed or describes an invalid scenario."""
