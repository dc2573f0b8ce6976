"""Poincare compactification: the four local charts at infinity.

For a field ``(P, Q)`` of degree ``n`` the chart fields are

* ``U1`` (``x > 0``, coordinates ``u = y/x, v = 1/x``)::

      u' = v^n (Q(1/v, u/v) - u P(1/v, u/v)),   v' = -v^(n+1) P(1/v, u/v)

* ``U2`` (``y > 0``, coordinates ``u = x/y, v = 1/y``)::

      u' = v^n (P(u/v, 1/v) - u Q(u/v, 1/v)),   v' = -v^(n+1) Q(u/v, 1/v)

and ``V1``, ``V2`` are ``(-1)^n`` times ``U1``, ``U2``.  Chart fields are
written back in the variables ``x, y`` (``u -> x``, ``v -> y``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lyapunov import XY, PlanarSystem
from .polyalg import MultiPoly, PolyError
from .polyalg.roots import AlgebraicNumber, real_roots

CHARTS = ("U1", "U2", "V1", "V2")


class CompactifyError(ValueError):
    pass


@dataclass(frozen=True)
class LocalChartSystem:
    chart: str
    P: MultiPoly
    Q: MultiPoly
    source_degree: int
    log: tuple = field(default_factory=tuple)

    @property
    def system(self) -> PlanarSystem:
        return PlanarSystem(self.P, self.Q)

    def to_json(self) -> dict:
        from .polyalg import to_string

        return {
            "chart": self.chart,
            "P": to_string(self.P),
            "Q": to_string(self.Q),
            "source_degree": self.source_degree,
            "log": list(self.log),
        }


def _homogenize(p: MultiPoly, n: int, chart: str) -> MultiPoly:
    """``v^n p(1/v, u/v)`` for U1 or ``v^n p(u/v, 1/v)`` for U2, as a polynomial in x=u, y=v."""
    t = p.table
    ix, iy = t.var_index("x"), t.var_index("y")
    out = {}
    for exps, c in p.terms():
        i, j = exps[ix], exps[iy]
        d = i + j
        e = list(exps)
        if chart == "U1":
            e[ix], e[iy] = j, n - d
        else:
            e[ix], e[iy] = i, n - d
        key = tuple(e)
        out[key] = out.get(key, 0) + c
    return MultiPoly.from_terms(out, t)


def chart_system(sys: PlanarSystem, chart: str) -> LocalChartSystem:
    """Expression of ``sys`` in the local chart ``chart`` (one of U1, U2, V1, V2)."""
    if chart not in CHARTS:
        raise CompactifyError(f"unknown chart {chart!r}; expected one of {CHARTS}")
    n = sys.degree
    if n < 1:
        raise CompactifyError("the compactification needs a system of degree at least 1")
    base = "U" + chart[1]
    Ph = _homogenize(sys.P, n, base)
    Qh = _homogenize(sys.Q, n, base)
    x = MultiPoly.var("x", sys.table)
    y = MultiPoly.var("y", sys.table)
    if base == "U1":
        P, Q = Qh - x * Ph, -(y * Ph)
        log = [f"U1: (x, y) = (1/v, u/v), cleared by v^{n}"]
    else:
        P, Q = Ph - x * Qh, -(y * Qh)
        log = [f"U2: (x, y) = (u/v, 1/v), cleared by v^{n}"]
    if chart[0] == "V" and n % 2:
        P, Q = -P, -Q
        log.append(f"{chart}: multiplied by (-1)^{n}")
    elif chart[0] == "V":
        log.append(f"{chart}: multiplied by (-1)^{n} = 1")
    return LocalChartSystem(chart, P, Q, n, tuple(log))


@dataclass(frozen=True)
class InfinitePoint:
    chart: str
    x: object  # Fraction or AlgebraicNumber; the y coordinate is 0
    multiplicity: int

    def coordinate_json(self):
        if isinstance(self.x, Fraction):
            return str(self.x)
        iv = self.x.interval
        return {"poly": [str(c) for c in self.x.poly], "interval": [str(iv.lo), str(iv.hi)],
                "approx": float(self.x)}


@dataclass(frozen=True)
class InfiniteEquilibria:
    points: tuple
    line_of_equilibria: bool

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _require_numeric(sys: PlanarSystem) -> None:
    if sys.parameters():
        raise CompactifyError(f"parameters {sys.parameters()} must be bound to numbers")


def infinite_equilibria(sys: PlanarSystem) -> InfiniteEquilibria:
    """Zeros of the U1 field on ``y = 0`` plus the origin of U2 when it is singular.

    The antipodal points in V1, V2 are implied and not listed.  If the U1 field
    vanishes identically on ``y = 0`` the circle at infinity is a line of
    equilibria and ``line_of_equilibria`` is set.
    """
    _require_numeric(sys)
    u1 = chart_system(sys, "U1")
    restricted = u1.P.substitute({"y": 0})
    if restricted.is_zero():
        return InfiniteEquilibria((), True)
    pts = []
    if not restricted.is_constant():
        for root, mult in real_roots(restricted):
            pts.append(InfinitePoint("U1", root, mult))
    u2 = chart_system(sys, "U2")
    if u2.P.constant_term() == 0 and u2.Q.constant_term() == 0:
        pts.append(InfinitePoint("U2", Fraction(0), 1))
    return InfiniteEquilibria(tuple(pts), False)


__all__ = [
    "CHARTS", "CompactifyError", "InfiniteEquilibria", "InfinitePoint", "LocalChartSystem",
    "chart_system", "infinite_equilibria", "AlgebraicNumber", "PolyError", "XY",
]
