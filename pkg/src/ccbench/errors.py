"""Exception hierarchy shared by the toolkit.

All library errors derive from CCBenchError so callers can catch one type;
the CLI maps the subtypes onto its stable exit codes.
"""


class CCBenchError(Exception):
    """Base class for all toolkit errors."""


class InputDomainError(CCBenchError):
    """An argument violates an operation's stated input domain."""


class DegenerateIlluminantError(CCBenchError):
    """An illuminant component is zero, negative, or non-finite."""


class DegenerateSceneError(CCBenchError):
    """Image statistics collapsed (e.g. an all-zero channel), so no
    strictly positive illuminant estimate exists."""


class InsufficientSupportError(CCBenchError):
    """Too few pixels survived filtering to support a robust estimate."""


class ManifestError(CCBenchError):
    """A dataset manifest failed to parse or validate."""


class BridgeError(CCBenchError):
    """A prediction bridge directory failed validation."""


class IncompleteGridError(CCBenchError):
    """A cross-dataset matrix is missing at least one (train, test) cell."""
