"""JSON form of polynomials: ``{"vars": [...], "terms": [{"exp", "num", "den"}]}``.

Terms are written in the canonical degrevlex order, largest first, so equal
polynomials serialize to identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .poly import CANONICAL, MultiPoly, PolyError, VariableTable


def to_json(p: MultiPoly) -> dict:
    return {
        "vars": list(p.table.names),
        "terms": [
            {"exp": list(exps), "num": str(c.numerator), "den": str(c.denominator)}
            for exps, c in p.terms()
        ],
    }


def _table_for(names) -> VariableTable:
    names = tuple(names)
    return CANONICAL if names == CANONICAL.names else VariableTable(names)


def from_json(obj: dict, table: VariableTable | None = None) -> MultiPoly:
    """Inverse of :func:`to_json`; re-expresses the result over ``table`` if given."""
    try:
        src = _table_for(obj["vars"])
        terms = {}
        for t in obj["terms"]:
            exps = tuple(int(e) for e in t["exp"])
            if len(exps) != len(src):
                raise PolyError(f"exponent vector {exps} does not match {len(src)} variables")
            if any(e < 0 for e in exps):
                raise PolyError(f"negative exponent in {exps}")
            c = Fraction(int(t["num"]), int(t.get("den", "1")))
            terms[exps] = terms.get(exps, 0) + c
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PolyError):
            raise
        raise PolyError(f"malformed polynomial JSON: {exc}") from exc
    p = MultiPoly.from_terms(terms, src)
    return p if table is None or table == src else p.to_table(table)


def dumps(p: MultiPoly) -> str:
    return json.dumps(to_json(p), separators=(",", ":"))


def loads(text: str, table: VariableTable | None = None) -> MultiPoly:
    return from_json(json.loads(text), table)
