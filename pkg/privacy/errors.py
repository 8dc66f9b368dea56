"""
Exceptions raised by the release library.
The CLI and the HTTP app catch these; the library itself never swallows them.
"""


class ReleaseError(ValueError):
    """Base class for every error raised by the privacy package."""


class InvalidDataError(ReleaseError):
    """Non-finite values, empty matrices or out-of-range arguments."""


class DimensionMismatchError(ReleaseError):
    """Operand shapes do not line up (e.g. X.cols != P.d)."""


class CalibrationError(ReleaseError):
    """Privacy parameters are missing, inconsistent or violate a precondition."""


class DiagnosticsDisabledError(ReleaseError):
    """Release internals were requested outside of a diagnostics context."""
