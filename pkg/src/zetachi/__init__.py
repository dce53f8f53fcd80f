"""Zeros of ζ, sums of χ(ρ)X^ρ over them, and checks against their asymptotics."""

from __future__ import annotations

from .errors import (
    AuditError,
    CoverageError,
    DomainError,
    InsufficientGridError,
    ParseError,
    QuadratureError,
    UnknownClaimError,
    ZetaChiError,
)
from .zeros import ZeroTable, ZeroWindow, find_zeros, import_zero_table, load_table, save_table

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "CoverageError",
    "DomainError",
    "InsufficientGridError",
    "ParseError",
    "QuadratureError",
    "UnknownClaimError",
    "ZetaChiError",
    "ZeroTable",
    "ZeroWindow",
    "find_zeros",
    "import_zero_table",
    "load_table",
    "save_table",
]
