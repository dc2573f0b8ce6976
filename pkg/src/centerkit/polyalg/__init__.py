"""Exact polynomial algebra: rationals, sparse polynomials, parsing, real roots."""

from .poly import CANONICAL, PARAMETERS, MultiPoly, PolyError, VariableTable, arith, const, var
from .parse import ParseError, parse, to_string
from .roots import AlgebraicNumber, Interval, real_roots, squarefree_decomposition, sturm_sequence
from .serialize import dumps, from_json, loads, to_json

__all__ = [
    "CANONICAL", "PARAMETERS", "MultiPoly", "PolyError", "VariableTable",
    "ParseError", "arith", "const", "parse", "to_string", "var",
    "AlgebraicNumber", "Interval", "real_roots", "squarefree_decomposition", "sturm_sequence",
    "dumps", "from_json", "loads", "to_json",
]
