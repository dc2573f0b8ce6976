"""Reference data for the quintic family and helpers that compare against it.

The JSON fixtures under ``centerkit/fixtures`` hold literal transcriptions of
displayed formulas.  Where a transcription is known to be wrong the fixture
carries the correction next to the literal text, so both can be checked.

Chain displays are written in the coefficient names of the family restricted
to ``a0 = a2 = a4 = 0``; :func:`display_notation` maps them to ``a1, a3, a5``
(``a^2`` is ``-a5``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .compactify import chart_system
from .desing import horizontal_blowup, time_rescale, translate, twist, vertical_blowup
from .ideals import (Budget, MonomialOrder, buchberger, intersect, is_in_radical,
                     normal_form)
from .lyapunov import PlanarSystem, lyapunov_constants, quintic_family
from .polyalg import MultiPoly, parse

BAUTIN_INDICES = (3, 5, 7, 9, 11, 13, 15)


class GarbledFixture(RuntimeError):
    """A fixture marked as garbled was requested without opting in."""


def fixture_text(name: str) -> str:
    return resources.files("centerkit").joinpath("fixtures", name).read_text(encoding="utf-8")


def fixture_json(name: str):
    return json.loads(fixture_text(name))


def fixture_path(name: str) -> str:
    return str(resources.files("centerkit").joinpath("fixtures", name))


# ---------------------------------------------------------------------------
# Lyapunov constants


def displayed_constants(corrected: bool = False) -> dict:
    """``{j: MultiPoly}`` for the displayed ``L_1 .. L_9``."""
    data = fixture_json("constants.json")
    out = {}
    for key, text in data.items():
        if not key.startswith("L"):
            continue
        fix = data["corrections"].get(key)
        if corrected and fix:
            if fix["term"] not in text:
                raise ValueError(f"correction for {key} does not apply")
            text = text.replace(fix["term"], fix["corrected"], 1)
        out[int(key[1:])] = parse(text)
    return out


@lru_cache(maxsize=4)
def computed_constants(count: int = 17):
    return lyapunov_constants(quintic_family(), count)


def bautin_ideal(indices=BAUTIN_INDICES) -> list:
    """Generators ``L_3, L_5, ..., L_15`` of ``R``."""
    seq = computed_constants(max(max(indices), 3))
    return [seq[j] for j in indices]


def compare_constant(computed: MultiPoly, displayed: MultiPoly, earlier: list,
                     order: MonomialOrder | None = None) -> dict:
    """Compare modulo ``<earlier>`` and up to one positive rational factor.

    Returns ``match`` and the factor ``f`` with ``NF(displayed) = f * NF(computed)``
    (``None`` when no positive factor works).
    """
    order = order or MonomialOrder.parameters_first_a0()
    if earlier:
        gb = buchberger(earlier, order)
        a, b = normal_form(computed, gb), normal_form(displayed, gb)
    else:
        a, b = computed, displayed
    if a.is_zero() or b.is_zero():
        same = a.is_zero() and b.is_zero()
        return {"match": same, "factor": "1" if same else None, "difference": None if same else str(b - a)}
    m, ca = next(iter(a.items()))
    cb = dict(b.items()).get(m, 0)
    factor = Fraction(cb) / Fraction(ca) if cb else None
    ok = factor is not None and factor > 0 and (b - a.scale(factor)).is_zero()
    diff = None if ok else str(b - a.scale(factor if factor and factor > 0 else 1))
    return {"match": ok, "factor": str(factor) if ok else None, "difference": diff}


# ---------------------------------------------------------------------------
# ideals


def ideal_fixture(name: str, allow_garbled: bool = False, reading: str | None = None) -> list:
    data = fixture_json("ideals.json")
    entry = data[name]
    if isinstance(entry, dict):
        if entry.get("garbled") and not allow_garbled:
            raise GarbledFixture(f"{name} is marked garbled: {entry['provenance']}")
        gens = entry["alternative_readings"][reading] if reading else entry["generators"]
    else:
        gens = entry
    return [parse(g) for g in gens]


def saturation(gens: list, p: MultiPoly, budget: Budget | None = None) -> list:
    """Generators of ``<gens> : p^oo`` by eliminating ``w`` from ``<gens, 1 - w p>``."""
    table = p.table
    w = MultiPoly.var("w", table)
    gb = buchberger(list(gens) + [MultiPoly.const(1, table) - w * p],
                    MonomialOrder("elim", MonomialOrder().priority), budget)
    kept = [g for g in gb.generators if "w" not in g.variables()]
    return buchberger(kept, MonomialOrder(), budget).generators


def t3_surrogate(budget: Budget | None = None) -> list:
    """``R : a0^oo``, standing in for the garbled third component."""
    return saturation(bautin_ideal(), parse("a0"), budget)


def t_ideal(budget: Budget | None = None, garbled_t3: bool = False) -> list:
    """Generators of ``T1 ∩ T2 ∩ T3``; ``T3`` is the literal fixture only when opted in."""
    t3 = ideal_fixture("T3", allow_garbled=True) if garbled_t3 else t3_surrogate(budget)
    t12 = intersect(ideal_fixture("T1"), ideal_fixture("T2"), budget=budget)
    return intersect(t12, t3, budget=budget)


def radical_double_inclusion(T: list, R: list | None = None, budget: Budget | None = None) -> dict:
    """Both inclusions of ``sqrt(T) = sqrt(R)``, one boolean per polynomial."""
    R = bautin_ideal() if R is None else R
    forward = [is_in_radical(L, T, budget=budget) for L in R]
    backward = [is_in_radical(p, R, budget=budget) for p in T]
    return {"L_in_sqrt_T": forward, "T_in_sqrt_R": backward,
            "equal": all(forward) and all(backward)}


# ---------------------------------------------------------------------------
# compactification and blow-up chains


def display_notation(text: str) -> MultiPoly:
    return parse(text.replace("a^2", "(-a5)").replace("a32", "a3").replace("a14", "a1"))


def center_system() -> PlanarSystem:
    """The family with ``a0 = a2 = a4 = 0``."""
    return quintic_family().evaluate({"a0": 0, "a2": 0, "a4": 0})


_CASES = {
    "c2": ("U2", {"a1": 0, "a5": 0}),
    "c3": ("U2", {"a1": 0}),
    "c4": ("U1", {"a1": 0, "a5": 0}),
    "c5": ("U2", {"a1": 0, "a3": 0}),
}


def case_chart(case: str) -> PlanarSystem:
    chart, zero = _CASES[case]
    return chart_system(center_system(), chart).system.evaluate(zero)


_STEPS = {
    "blowup": lambda s, *a: vertical_blowup(s),
    "hblowup": lambda s, *a: horizontal_blowup(s),
    "rescale": lambda s, k: time_rescale(s, k),
    "twist": lambda s, *a: twist(s),
    "translate": lambda s, dx, dy: translate(s, dx, dy),
}


@dataclass(frozen=True)
class Display:
    name: str
    parent: str
    steps: tuple
    P: str | None
    Q: str | None
    corrected_P: str | None = None
    corrected_Q: str | None = None
    note: str | None = None


DISPLAYS = {d.name: d for d in (
    Display("U1", "center", (("chart", "U1"),),
            "-y^4*x^2+a14*x^4-y^4+a32*x^2-a^2", "-y^5*x"),
    Display("U2", "center", (("chart", "U2"),),
            "a^2*x^6+y^4*x^2-a32*x^4+y^4-a14*x^2", "x*y*(a^2*x^4+y^4-a32*x^2-a14)"),
    Display("U2_1", "U2", (("blowup",),),
            "x^2*(x^4*y^4+a^2*x^4+x^2*y^4-a32*x^2-a14)", "-x^3*y^5"),
    Display("U2_2", "U2_1", (("rescale", 2),),
            "x^4*y^4+a^2*x^4+x^2*y^4-a32*x^2-a14", "-x*y^5"),
    Display("c2", "case", (),
            "x^2*y^4+y^4-a32*x^4", "y*x*(x^4-a32*x^2)",
            corrected_Q="x*y*(y^4-a32*x^2)",
            note="the displayed y-component has x^4 where y^4 belongs"),
    Display("c2_1", "c2", (("blowup",),),
            "-x^4*(-x^2*y^4-y^4+a32)", "-x^3*y^5"),
    Display("c2_2", "c2_1", (("rescale", 3),),
            "-x*(-x^2*y^4-y^4+a32)", "-y^5"),
    Display("c3", "case", (),
            "a^2*x^6 + x^2*y^4+ y^4- a32*x^4", "x*y*(a^2*x^4+y^4-a32*x^2)"),
    Display("c3_1", "c3", (("blowup",),),
            "x^4*(x^2*y^4+y^4+a^2*x^2- a32)", "-x^3*y^5"),
    Display("c3_2", "c3_1", (("rescale", 3),),
            "x*(x^2*y^4+y^4+a^2*x^2- a32)", "-y^5"),
    Display("c4", "case", (),
            "(a32-y^4)*x^2-y^4", "-y^5*x"),
    Display("c4_1", "c4", (("blowup",),),
            "-x^2*(x^4*y^4+x^2*y^4 -a32)", "x*y*(x^2*y^4-a32)"),
    Display("c4_2", "c4_1", (("rescale", 1),),
            "-x*(x^4*y^4+x^2*y^4 -a32)", "y*(x^2*y^4-a32)"),
    Display("c5", "case", (),
            "a^2*x^6 + x^2*y^4 + y^4", "x*y*(a^2*x^4 + y^4)"),
    Display("c5_1", "c5", (("blowup",), ("rescale", 3)),
            "x*(x^2*y^4+y^4+a^2*x^2)", "-y^5"),
    Display("c5_2", "c5_1", (("twist",),),
            "x^3*y^4-3*x^2*y^5+3*x*y^6-y^7-2*y^5+ x*y^4+a^2*x^3-a^2*(3*x^2*y-3*x*y^2- y^3)", "-y^5",
            corrected_P="x^3*y^4-3*x^2*y^5+3*x*y^6-y^7-2*y^5+ x*y^4+a^2*x^3-a^2*(3*x^2*y-3*x*y^2+ y^3)",
            note="the sign of the a^2*y^3 term is flipped in the display"),
    Display("c5_3", "c5_2", (("blowup",), ("rescale", 2)),
            "-x*(x^4*y^7-3*x^4*y^6+3*x^4*y^5 - x^4*y^4+2*x^2*y^5-x^2*y^4+a^2*y^3-3*a^2*y^2 + 3*a^2*y-a^2)",
            "(x^4*y^6-2*x^4*y^5+x^4*y^4+2*x^2*y^4+a^2*y^2-2*a^2*y+a^2)*(y^2-y)"),
    Display("c5_4", "c5_3", (("translate", 0, 1),),
            "-x*(x^2+6*x^2+14*x^2*y^2+a^2*y^3+16*x^2*y^3+x^4*y^2+9*x^2*y^4+4*x^4*y^4+2*x^2*y^5"
            "+6*x^4*y^4+4*x^4*y^6+x^4*y^7)",
            "y*(1+y)*(2*x^2+8*x^2*y+a^2*y^2+12*x^2*y^2+x^4*y^2+8*x^2*y^3+4*x^4*y^3+2*x^2*y^4"
            "+6*x^4*y^4+4*x^4*y^5+x^4*y^6)",
            corrected_P="-x*(x^2+6*x^2*y+14*x^2*y^2+a^2*y^3+16*x^2*y^3+x^4*y^3+9*x^2*y^4+4*x^4*y^4+2*x^2*y^5"
                        "+6*x^4*y^5+4*x^4*y^6+x^4*y^7)",
            note="exponent slips in the x-component, fixed in corrected_P"),
    Display("c6_5", "c5_4", (("twist",), ("blowup",), ("rescale", 2)), None, None,
            note="displayed only through f and g of degrees 21 and 20"),
)}


def chain_system(name: str) -> PlanarSystem:
    """The computed system behind a display name."""
    d = DISPLAYS[name]
    if d.parent == "center":
        base = center_system()
    elif d.parent == "case":
        return case_chart(name)
    else:
        base = chain_system(d.parent)
    for step in d.steps:
        if step[0] == "chart":
            base = chart_system(base, step[1]).system
        else:
            base = _STEPS[step[0]](base, *step[1:])
    return base


def compare_display(name: str, corrected: bool = True) -> dict:
    """Exact comparison of a computed chain system with its display."""
    d = DISPLAYS[name]
    sys = chain_system(name)
    out = {"name": name}
    for comp, literal, fixed in (("P", d.P, d.corrected_P), ("Q", d.Q, d.corrected_Q)):
        text = fixed if corrected and fixed else literal
        diff = getattr(sys, comp) - display_notation(text)
        out[comp] = diff.is_zero()
        out[comp + "_corrected"] = bool(corrected and fixed)
        if not diff.is_zero():
            out[comp + "_difference"] = str(diff)
    out["match"] = out["P"] and out["Q"]
    if d.note:
        out["note"] = d.note
    return out


def c6_5_fg() -> tuple:
    """``f = -P/x - 1 + 5y`` and ``g = Q/(y(1-y)) - 3 + 6y`` of the last chain system."""
    s = chain_system("c6_5")
    y = MultiPoly.var("y", s.table)
    one = MultiPoly.const(1, s.table)
    A = -(s.P.divide_by_monomial({"x": 1}))
    B = s.Q.divide_by_monomial({"y": 1})
    parts = B.collect(["y"])
    n = max(k[0] for k in parts)
    q = MultiPoly.zero(s.table)
    acc = MultiPoly.zero(s.table)
    for k in range(n):
        acc = acc + parts.get((k,), MultiPoly.zero(s.table))
        q = q + acc * y ** k
    if not (q * (one - y) - B).is_zero():
        raise ValueError("Q/y is not divisible by 1 - y")
    f = A - one + y.scale(5)
    g = q - one.scale(3) + y.scale(6)
    return f, g


__all__ = [
    "BAUTIN_INDICES", "DISPLAYS", "Display", "GarbledFixture", "bautin_ideal", "c6_5_fg",
    "case_chart", "center_system", "chain_system", "compare_constant", "compare_display",
    "computed_constants", "displayed_constants", "fixture_json", "fixture_path", "fixture_text",
    "ideal_fixture", "display_notation", "radical_double_inclusion", "saturation", "t3_surrogate",
    "t_ideal",
]
