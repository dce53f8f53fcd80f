"""Exception types shared across the package."""

from __future__ import annotations


class ZetaChiError(Exception):
    """Base class for all package errors."""


class PoleError(ZetaChiError, ValueError):
    """Evaluation requested at (or numerically on top of) a pole."""


class DomainError(ZetaChiError, ValueError):
    """Argument outside the region where an operation is defined."""


class UnsupportedError(ZetaChiError, ValueError):
    """Unknown kind/index/claim requested."""


class SieveLimitError(ZetaChiError, ValueError):
    """A von Mangoldt value beyond the sieve was needed."""


class AuditError(ZetaChiError):
    """Two independent zero counts disagree."""


class MissedZeroError(AuditError):
    """Zero search finished with fewer sign changes than the argument count."""


class RefinementError(ZetaChiError):
    """A bracketed zero could not be refined."""


class ParseError(ZetaChiError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MonotonicityError(ParseError):
    """Ordinates are not strictly increasing."""


class CoverageError(ZetaChiError, ValueError):
    """Requested range extends past the zero table."""


class ZeroTooCloseError(ZetaChiError):
    """Could not move a contour edge away from a zero ordinate."""


class QuadratureError(ZetaChiError):
    """Adaptive quadrature ran out of subdivisions.

    ``value`` and ``est_error`` hold the partial result.
    """

    def __init__(self, message: str, value: complex, est_error: float):
        self.value = value
        self.est_error = est_error
        super().__init__(message)


class InsufficientGridError(ZetaChiError, ValueError):
    """Calibration needs at least four grid points."""


class UnknownClaimError(ZetaChiError, KeyError):
    """A claim id not in the comparison registry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown claim"
