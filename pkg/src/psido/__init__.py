"""Numerical pseudodifferential calculus on a periodic grid."""

from .errors import PsidoError
from .quantize import GridContext, GridOperator, extract_symbol, quantize
from .symbols import Symbol, bracket_symbol, expr_symbol, make_symbol, r_symbol

__all__ = [
    "GridContext",
    "GridOperator",
    "PsidoError",
    "Symbol",
    "bracket_symbol",
    "expr_symbol",
    "extract_symbol",
    "make_symbol",
    "quantize",
    "r_symbol",
]

__version__ = "0.1.0"
