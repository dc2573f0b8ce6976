"""Local phase portraits of planar equilibria by blow-up.

The module has three layers.

* Exact transformations of a :class:`PlanarSystem`: vertical and horizontal
  directional blow-ups, the twist ``(x, y) -> (x - y, y)``, translations and
  time rescalings by powers of ``x``.
* Classification of an equilibrium from its linear part: hyperbolic points by
  eigenvalue signs, semi-hyperbolic points by reducing to a center manifold
  ``v = h(u)`` and reading the first term ``a_m u^m`` of the reduced field.
* A depth-limited driver that blows up linearly zero (or nilpotent) points,
  resolves every equilibrium on the exceptional divisor and glues the pieces
  back into a cyclic sequence of hyperbolic, elliptic and parabolic sectors.

Points may have irrational coordinates.  Arithmetic at such a point happens in
``Q[t]/(m)`` where ``m`` is a square-free polynomial with the coordinate as a
root; signs are decided on the isolated root, and ``m`` is split whenever a
zero divisor shows up.

Invariant curves that matter to the caller (typically the line at infinity
``y = 0`` of a chart) are passed as *marked curves*; their strict transforms
are carried through every blow-up so that each separatrix of the final
portrait knows which marked curves it lies on.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lyapunov import XY, PlanarSystem
from .polyalg import MultiPoly, PolyError, VariableTable, parse
from .polyalg.roots import AlgebraicNumber, divmod_poly, real_roots

LOCAL = VariableTable(("x", "y", "t"))
DEFAULT_DEPTH = 6
DEFAULT_SERIES_ORDER = 12


class DesingError(ValueError):
    pass


class InexactRescale(DesingError):
    pass


class NotAnEquilibrium(DesingError):
    pass


class _Unresolved(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# exact transformations


def _xy(sys: PlanarSystem):
    return MultiPoly.var("x", sys.table), MultiPoly.var("y", sys.table)


def vertical_blowup(sys: PlanarSystem) -> PlanarSystem:
    """``(x, y) -> (x, x*y)``: the new field is ``(P, (Q - y P)/x)`` evaluated at ``(x, x y)``."""
    x, y = _xy(sys)
    sub = {"y": x * y}
    P = sys.P.substitute(sub)
    Q = sys.Q.substitute(sub)
    num = Q - y * P
    try:
        return PlanarSystem(P, num.divide_by_monomial({"x": 1}))
    except PolyError as exc:
        raise DesingError("vertical blow-up needs an equilibrium at the origin") from exc


def horizontal_blowup(sys: PlanarSystem) -> PlanarSystem:
    """``(x, y) -> (x*y, y)``, the coordinate-swapped counterpart of :func:`vertical_blowup`."""
    x, y = _xy(sys)
    sub = {"x": x * y}
    P = sys.P.substitute(sub)
    Q = sys.Q.substitute(sub)
    num = P - x * Q
    try:
        return PlanarSystem(num.divide_by_monomial({"y": 1}), Q)
    except PolyError as exc:
        raise DesingError("horizontal blow-up needs an equilibrium at the origin") from exc


def twist(sys: PlanarSystem, times: int = 1) -> PlanarSystem:
    """Old coordinates in terms of new ones: ``x_old = x - times*y``, ``y_old = y``."""
    x, y = _xy(sys)
    sub = {"x": x - y.scale(times)}
    P = sys.P.substitute(sub)
    Q = sys.Q.substitute(sub)
    return PlanarSystem(P + Q.scale(times), Q)


def untwist(sys: PlanarSystem, times: int = 1) -> PlanarSystem:
    return twist(sys, -times)


def translate(sys: PlanarSystem, dx=0, dy=0) -> PlanarSystem:
    """Move the point ``(dx, dy)`` to the origin."""
    x, y = _xy(sys)
    sub = {}
    if dx:
        sub["x"] = x + dx
    if dy:
        sub["y"] = y + dy
    return sys.substitute(sub)


def max_rescale_power(sys: PlanarSystem, var: str = "x") -> int:
    """Largest ``k`` with ``var^k`` dividing both components."""
    ps = [p.content_monomial_power(var) for p in (sys.P, sys.Q) if p]
    return min(ps) if ps else 0


def time_rescale(sys: PlanarSystem, power: int, var: str = "x") -> PlanarSystem:
    """Divide the field by ``var^power`` (a change of time ``dt = var^power ds``)."""
    if power < 0:
        raise InexactRescale("rescale power must be nonnegative")
    if power == 0:
        return sys
    try:
        return PlanarSystem(sys.P.divide_by_monomial({var: power}),
                            sys.Q.divide_by_monomial({var: power}))
    except PolyError as exc:
        raise InexactRescale(f"{var}^{power} does not divide both components") from exc


def transform(sys: PlanarSystem, kind: str, **kw):
    """Apply one named transformation; returns ``(new_system, record)``.

    ``kind`` is one of ``vertical_blowup``, ``horizontal_blowup``, ``twist``,
    ``untwist``, ``translate`` (``dx``, ``dy``) or ``time_rescale`` (``power``;
    ``power="max"`` picks the largest exact power of ``x``).
    """
    if kind == "vertical_blowup":
        out = vertical_blowup(sys)
    elif kind == "horizontal_blowup":
        out = horizontal_blowup(sys)
    elif kind == "twist":
        out = twist(sys, kw.get("times", 1))
    elif kind == "untwist":
        out = untwist(sys, kw.get("times", 1))
    elif kind == "translate":
        out = translate(sys, kw.get("dx", 0), kw.get("dy", 0))
    elif kind == "time_rescale":
        power = kw.get("power", "max")
        if power == "max":
            power = max_rescale_power(sys, kw.get("var", "x"))
        kw = dict(kw, power=power)
        out = time_rescale(sys, power, kw.get("var", "x"))
    else:
        raise DesingError(f"unknown transformation {kind!r}")
    record = {"op": kind}
    record.update({k: (str(v) if isinstance(v, Fraction) else v) for k, v in kw.items()})
    return out, record


def replay(sys: PlanarSystem, records: Sequence[dict]) -> PlanarSystem:
    """Re-apply a list of transformation records."""
    for r in records:
        kw = {k: v for k, v in r.items() if k != "op"}
        for k in ("dx", "dy"):
            if k in kw:
                kw[k] = Fraction(kw[k])
        sys, _ = transform(sys, r["op"], **kw)
    return sys


# ---------------------------------------------------------------------------
# characteristic directions


@dataclass(frozen=True)
class CharacteristicForm:
    """``gamma`` is built from the lowest-degree parts; ``full`` is ``P y - Q x``
    for the whole field, which some hand computations quote instead."""

    k: int
    gamma: MultiPoly
    dicritical: bool
    full: MultiPoly

    def x_is_characteristic(self) -> bool:
        """True when ``x`` divides ``gamma`` (the vertical direction is characteristic)."""
        return self.dicritical or self.gamma.coefficient_in(XY, (0, self.k + 1)).is_zero()


def characteristic_form(sys: PlanarSystem) -> CharacteristicForm:
    """``gamma_k = P_k y - Q_k x`` for the lowest degree ``k`` present in ``P`` or ``Q``."""
    if sys.P.homogeneous_component(0, XY) or sys.Q.homogeneous_component(0, XY):
        raise NotAnEquilibrium("the origin is not an equilibrium")
    if not sys.P and not sys.Q:
        raise DesingError("the field vanishes identically")
    k = min(p.min_degree(XY) for p in (sys.P, sys.Q) if p)
    x, y = _xy(sys)
    Pk = sys.P.homogeneous_component(k, XY)
    Qk = sys.Q.homogeneous_component(k, XY)
    gamma = Pk * y - Qk * x
    return CharacteristicForm(k, gamma, gamma.is_zero(), sys.P * y - sys.Q * x)


# ---------------------------------------------------------------------------
# arithmetic at a (possibly irrational) point


def _ext_gcd(a: list, b: list):
    """``(g, s)`` with ``s*a = g mod b`` and ``g`` monic."""
    r0, r1 = list(b), list(a)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    lead = r0[-1]
    return [c / lead for c in r0], [c / lead for c in s0]


def _psub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


class PointField:
    """The field generated by one real coordinate ``t``.

    A rational coordinate gives ``Q`` itself; otherwise elements are
    polynomials in ``t`` reduced modulo ``m``, where ``m`` is square-free with
    the coordinate as a root (``m`` shrinks to a factor when needed).
    """

    def __init__(self, root):
        if isinstance(root, AlgebraicNumber):
            if len(root.poly) == 2:
                root = -root.poly[0]
            else:
                self.root = root
                self.m = list(root.poly)
                self.q = None
                return
        self.q = Fraction(root)
        self.root = self.q
        self.m = [-self.q, Fraction(1)]

    @property
    def is_rational(self) -> bool:
        return self.q is not None

    def generator(self) -> MultiPoly:
        if self.is_rational:
            return MultiPoly.const(self.q, LOCAL)
        return MultiPoly.var("t", LOCAL)

    def reduce(self, p: MultiPoly) -> MultiPoly:
        if p.degree_in("t") <= 0:
            return p
        if self.is_rational:
            return p.substitute({"t": self.q})
        out = MultiPoly.zero(LOCAL)
        for (i, j), c in p.collect(XY).items():
            rem = divmod_poly(c.univariate_coeffs("t"), self.m)[1]
            mono = MultiPoly.from_terms({(i, j, 0): 1}, LOCAL)
            out = out + mono * MultiPoly.from_univariate(rem, "t", LOCAL)
        return out

    def _coeffs(self, c: MultiPoly) -> list:
        if c.degree(XY) > 0:
            raise DesingError(f"{c} is not a scalar")
        if c.degree_in("t") <= 0:
            return [c.constant_term()] if c else []
        return c.univariate_coeffs("t")

    def sign(self, c: MultiPoly) -> int:
        cs = self._coeffs(c)
        if not cs:
            return 0
        if self.is_rational:
            v = sum(a * self.q ** k for k, a in enumerate(cs))
            return (v > 0) - (v < 0)
        return self.root.sign_of(cs)

    def is_zero(self, c: MultiPoly) -> bool:
        return self.sign(c) == 0

    def inverse(self, c: MultiPoly) -> MultiPoly:
        if self.sign(c) == 0:
            raise ZeroDivisionError("inverse of zero at this point")
        cs = self._coeffs(c)
        if self.is_rational:
            v = sum(a * self.q ** k for k, a in enumerate(cs))
            return MultiPoly.const(1 / v, LOCAL)
        while True:
            g, s = _ext_gcd(cs, self.m)
            if len(g) == 1:
                return MultiPoly.from_univariate(s, "t", LOCAL)
            # the root is not a root of g, so it lives on the cofactor
            self.m = divmod_poly(self.m, g)[0]
            cs = divmod_poly(cs, self.m)[1]

    def approx(self, c: MultiPoly) -> float:
        cs = self._coeffs(c)
        r = float(self.root)
        return float(sum(float(a) * r ** k for k, a in enumerate(cs)))

    def describe(self):
        if self.is_rational:
            return str(self.q)
        iv = self.root.interval
        return {"poly": [str(c) for c in self.m], "interval": [str(iv.lo), str(iv.hi)],
                "approx": float(self.root)}


# ---------------------------------------------------------------------------
# portraits


class Direction:
    """A tangent direction ``(dx, dy)`` with components in a point field."""

    __slots__ = ("dx", "dy", "field")

    def __init__(self, dx: MultiPoly, dy: MultiPoly, fld: PointField):
        self.dx = fld.reduce(dx)
        self.dy = fld.reduce(dy)
        self.field = fld

    @classmethod
    def of(cls, dx, dy, fld: PointField) -> "Direction":
        def lift(v):
            return v if isinstance(v, MultiPoly) else MultiPoly.const(v, LOCAL)
        return cls(lift(dx), lift(dy), fld)

    def __neg__(self) -> "Direction":
        return Direction(-self.dx, -self.dy, self.field)

    def sign_dx(self) -> int:
        return self.field.sign(self.dx)

    def sign_dy(self) -> int:
        return self.field.sign(self.dy)

    def cross(self, other: "Direction") -> int:
        if other.field is not self.field:
            raise DesingError("directions from different point fields")
        return self.field.sign(self.dx * other.dy - self.dy * other.dx)

    def linear(self, a, b, c, d) -> "Direction":
        return Direction(self.dx.scale(a) + self.dy.scale(b),
                         self.dx.scale(c) + self.dy.scale(d), self.field)

    def approx(self) -> tuple:
        return (self.field.approx(self.dx), self.field.approx(self.dy))


@dataclass(frozen=True)
class Separatrix:
    """A separatrix (or, with ``ray=True``, an ordinary orbit inside a parabolic
    sector that lies on a marked curve) together with its orientation."""

    orient: str
    direction: Direction | None
    labels: frozenset = frozenset()
    ray: bool = False

    def flipped(self) -> "Separatrix":
        return Separatrix(_flip(self.orient), self.direction, self.labels, self.ray)

    def moved(self, direction: Direction) -> "Separatrix":
        return Separatrix(self.orient, direction, self.labels, self.ray)

    def to_json(self) -> dict:
        d = {"type": "ray" if self.ray else "separatrix", "orient": self.orient,
             "labels": sorted(self.labels)}
        if self.direction is not None:
            d["direction"] = list(self.direction.approx())
        return d

    def __str__(self) -> str:
        tag = ",".join(sorted(self.labels))
        head = "R" if self.ray else "S"
        return f"{head}({self.orient}{',' + tag if tag else ''})"


@dataclass(frozen=True)
class Sector:
    kind: str  # "H", "E" or "P"
    orient: str | None = None  # "in" / "out" for parabolic sectors

    def flipped(self) -> "Sector":
        return Sector(self.kind, _flip(self.orient))

    def to_json(self) -> dict:
        d = {"type": "sector", "kind": self.kind}
        if self.orient:
            d["orient"] = self.orient
        return d

    def __str__(self) -> str:
        return f"{self.kind}({self.orient})" if self.orient else self.kind


def _flip(o):
    return {"in": "out", "out": "in"}.get(o, o)


@dataclass(frozen=True)
class SectorSequence:
    """Counterclockwise cyclic list of separatrices and sectors."""

    items: tuple
    monodromic: bool = False

    def sectors(self) -> list:
        return [i for i in self.items if isinstance(i, Sector)]

    def separatrices(self) -> list:
        return [i for i in self.items if isinstance(i, Separatrix) and not i.ray]

    def count(self, kind: str) -> int:
        return sum(1 for s in self.sectors() if s.kind == kind)

    def two_hyperbolic_on(self, label: str) -> bool:
        """Exactly two hyperbolic sectors and two separatrices, all separatrices on ``label``."""
        if self.monodromic:
            return False
        secs = self.sectors()
        seps = self.separatrices()
        return (len(secs) == 2 and all(s.kind == "H" for s in secs) and len(seps) == 2
                and all(label in s.labels for s in seps))

    def to_json(self) -> dict:
        return {"monodromic": self.monodromic, "items": [i.to_json() for i in self.items],
                "summary": str(self)}

    def __str__(self) -> str:
        if self.monodromic:
            return "monodromic"
        return " ".join(str(i) for i in self.items)


def _combine(a: Sector, b: Sector) -> list:
    """Glue two sectors that meet along a regular arc of the exceptional divisor."""
    ka, kb = a.kind, b.kind
    if ka == "H" and kb == "H":
        return [a]
    if ka == "P" and kb == "H":
        return [a]
    if ka == "H" and kb == "P":
        return [b]
    if ka == "P" and kb == "P":
        if a.orient == b.orient:
            return [a]
        return [a, Sector("E"), b]
    if ka == "E" and kb in ("E", "P"):
        return [a]
    if kb == "E" and ka == "P":
        return [b]
    raise _Unresolved(f"cannot glue sectors {a} and {b}")


def _glue(items: list) -> list:
    """Merge adjacent sectors of a cyclic list until sectors and separatrices alternate."""
    if not items:
        return []
    seps = [i for i, it in enumerate(items) if isinstance(it, Separatrix)]
    if seps:
        k = seps[0]
        items = items[k:] + items[:k]
        out = []
        for it in items:
            if out and isinstance(it, Sector) and isinstance(out[-1], Sector):
                last = out.pop()
                out.extend(_combine(last, it))
            else:
                out.append(it)
        return out
    out = [items[0]]
    for it in items[1:]:
        last = out.pop()
        out.extend(_combine(last, it))
    while len(out) > 1:
        first = out.pop(0)
        last = out.pop()
        merged = _combine(last, first)
        if len(merged) == 2 and merged == [last, first]:
            out = [first] + out + [last]
            break
        out = merged[:1] + out + merged[1:] if len(merged) > 1 else merged + out
        if len(merged) > 1:
            break
    return out


def _angle_cmp(a: Direction, b: Direction) -> int:
    def half(d):
        sy, sx = d.sign_dy(), d.sign_dx()
        return 0 if sy > 0 or (sy == 0 and sx > 0) else 1
    ha, hb = half(a), half(b)
    if ha != hb:
        return ha - hb
    return -a.cross(b)


# ---------------------------------------------------------------------------
# local systems


@dataclass
class _Local:
    P: MultiPoly
    Q: MultiPoly
    field: PointField
    marks: list  # [(label, G)] with G(0, 0) = 0

    def J(self):
        rows = []
        for f in (self.P, self.Q):
            lin = f.homogeneous_component(1, XY)
            rows.append([self.field.reduce(lin.coefficient_in(XY, (1, 0))),
                         self.field.reduce(lin.coefficient_in(XY, (0, 1)))])
        return rows


def _local_from(sys: PlanarSystem, point, marks) -> _Local:
    if sys.parameters():
        raise DesingError(f"parameters {sys.parameters()} must be bound to numbers")
    try:
        P = sys.P.to_table(LOCAL)
        Q = sys.Q.to_table(LOCAL)
    except PolyError as exc:
        raise DesingError(str(exc)) from exc
    px, py = point
    alg = [c for c in (px, py) if isinstance(c, AlgebraicNumber) and len(c.poly) > 2]
    if len(alg) == 2 and alg[0] is not alg[1]:
        raise DesingError("points with two independent irrational coordinates are not supported")
    fld = PointField(alg[0] if alg else Fraction(0))
    x = MultiPoly.var("x", LOCAL)
    y = MultiPoly.var("y", LOCAL)

    def shift(c):
        if isinstance(c, AlgebraicNumber) and len(c.poly) > 2:
            return fld.generator()
        if isinstance(c, AlgebraicNumber):
            c = -c.poly[0]
        return MultiPoly.const(Fraction(c), LOCAL)

    sub = {"x": x + shift(px), "y": y + shift(py)}
    P = fld.reduce(P.substitute(sub))
    Q = fld.reduce(Q.substitute(sub))
    if not fld.is_zero(P.homogeneous_component(0, XY)) or not fld.is_zero(Q.homogeneous_component(0, XY)):
        raise NotAnEquilibrium(f"{point} is not an equilibrium")
    P = P - P.homogeneous_component(0, XY)
    Q = Q - Q.homogeneous_component(0, XY)
    lm = []
    for label, G in (marks or {}).items():
        G = fld.reduce(G.to_table(LOCAL).substitute(sub))
        if fld.is_zero(G.homogeneous_component(0, XY)):
            lm.append((label, G - G.homogeneous_component(0, XY)))
    return _Local(P, Q, fld, lm)


def _mark_gradients(loc: _Local) -> list:
    out = []
    for label, G in loc.marks:
        lin = G.homogeneous_component(1, XY)
        gx = loc.field.reduce(lin.coefficient_in(XY, (1, 0)))
        gy = loc.field.reduce(lin.coefficient_in(XY, (0, 1)))
        if loc.field.is_zero(gx) and loc.field.is_zero(gy):
            raise _Unresolved(f"marked curve {label} is singular at the point")
        out.append((label, gx, gy))
    return out


def _labels_for(d: Direction, grads) -> frozenset:
    return frozenset(l for l, gx, gy in grads if d.field.is_zero(gx * d.dx + gy * d.dy))


def _curve_directions(loc: _Local, grads) -> list:
    """Both tangent directions of every marked curve through the point."""
    out = []
    for label, gx, gy in grads:
        d = Direction(-gy, gx, loc.field)
        out.extend([d, -d])
    return out


def _node_items(loc: _Local, orient: str, grads) -> list:
    rays = _curve_directions(loc, grads)
    uniq = []
    for d in rays:
        if not any(d.cross(u) == 0 and _same_half(d, u) for u in uniq):
            uniq.append(d)
    uniq.sort(key=functools.cmp_to_key(_angle_cmp))
    if not uniq:
        return [Sector("P", orient)]
    items = []
    for d in uniq:
        items.append(Separatrix(orient, d, _labels_for(d, grads), ray=True))
        items.append(Sector("P", orient))
    return items


def _same_half(a: Direction, b: Direction) -> bool:
    return a.field.sign(a.dx * b.dx + a.dy * b.dy) > 0


def _four_directions(first: Direction, second: Direction) -> list:
    """``first, second, -first, -second`` rotated into counterclockwise order."""
    if first.cross(second) > 0:
        return [first, second, -first, -second]
    return [first, -second, -first, second]


def _cross_items(dirs: list, roles: list, grads) -> list:
    """Items for four ccw directions; ``roles[i]`` is ``("sep", orient)`` or ``("nodal", orient)``."""
    items = []
    n = len(dirs)
    for i in range(n):
        d, (role, orient) = dirs[i], roles[i]
        labels = _labels_for(d, grads)
        if role == "sep":
            items.append(Separatrix(orient, d, labels))
        elif labels:
            items.append(Separatrix(orient, d, labels, ray=True))
        nxt = roles[(i + 1) % n]
        if role == "nodal":
            items.append(Sector("P", orient))
        elif nxt[0] == "nodal":
            items.append(Sector("P", nxt[1]))
        else:
            items.append(Sector("H"))
    # adjacent parabolic sectors with nothing between them are one sector
    out = []
    for it in items:
        if out and isinstance(it, Sector) and isinstance(out[-1], Sector):
            continue
        out.append(it)
    if len(out) > 1 and isinstance(out[0], Sector) and isinstance(out[-1], Sector):
        out.pop()
    return out


# ---------------------------------------------------------------------------
# elementary classification


def _trunc(p: MultiPoly, var: str, n: int) -> MultiPoly:
    i = p.table.var_index(var)
    return MultiPoly._raw(p.table, {m: c for m, c in p.items() if p.table.exponent(m, i) <= n})


def _graph_subs(F: PointField, f: MultiPoly, h: MultiPoly, n: int) -> MultiPoly:
    """``f(x, h(x))`` truncated at ``x^n``."""
    out = MultiPoly.zero(LOCAL)
    hp = MultiPoly.const(1, LOCAL)
    parts = f.collect(["y"])
    for j in range(max(k[0] for k in parts) + 1 if parts else 0):
        c = parts.get((j,))
        if c is not None:
            out = out + _trunc(c * hp, "x", n)
        hp = F.reduce(_trunc(hp * h, "x", n))
    return F.reduce(out)


def _semi_hyperbolic(loc: _Local, J, order: int) -> dict:
    F = loc.field
    (a, b), (c, d) = J
    lam = F.reduce(a + d)
    if not (F.is_zero(a) and F.is_zero(b)):
        k = (b, -a)
    else:
        k = (d, -c)
    e = (a, c) if not (F.is_zero(a) and F.is_zero(c)) else (b, d)
    det = F.reduce(k[0] * e[1] - k[1] * e[0])
    inv = F.inverse(det)
    x = MultiPoly.var("x", LOCAL)
    y = MultiPoly.var("y", LOCAL)
    sub = {"x": k[0] * x + e[0] * y, "y": k[1] * x + e[1] * y}
    P = F.reduce(loc.P.substitute(sub))
    Q = F.reduce(loc.Q.substitute(sub))
    # (u, v) = (x, y) now: u' = U has no linear part, v' = lam*v + ...
    U = F.reduce((e[1] * P - e[0] * Q) * inv)
    V = F.reduce((k[0] * Q - k[1] * P) * inv)
    inv_lam = F.inverse(lam)
    h = MultiPoly.zero(LOCAL)
    for n in range(2, order + 1):
        res = _trunc(h.diff("x") * _graph_subs(F, U, h, n), "x", n) - _graph_subs(F, V, h, n)
        coef = F.reduce(res.coefficient_in(XY, (n, 0)))
        if not F.is_zero(coef):
            h = h + MultiPoly.from_terms({(n, 0, 0): 1}, LOCAL) * F.reduce(coef * inv_lam)
    g = _graph_subs(F, U, h, order)
    for m in range(2, order + 1):
        am = F.reduce(g.coefficient_in(XY, (m, 0)))
        s = F.sign(am)
        if s:
            return {"m": m, "a_m_sign": s, "lambda_sign": F.sign(lam), "k": k, "e": e}
    raise _Unresolved(f"center-manifold reduction is flat up to order {order}")


def _eigenpairs(J, F: PointField):
    """Real eigenvalue/eigenvector pairs in the point field, or ``None``."""
    (a, b), (c, d) = J
    if F.is_zero(c):
        return [(a, (MultiPoly.const(1, LOCAL), MultiPoly.zero(LOCAL))), (d, (b, F.reduce(d - a)))]
    if F.is_zero(b):
        return [(a, (F.reduce(a - d), c)), (d, (MultiPoly.zero(LOCAL), MultiPoly.const(1, LOCAL)))]
    if not F.is_rational:
        return None
    tr = (a + d).constant_term()
    disc = tr * tr - 4 * ((a * d - b * c).constant_term())
    from math import isqrt
    if disc < 0:
        return None
    rn, rd = isqrt(disc.numerator), isqrt(disc.denominator)
    if rn * rn != disc.numerator or rd * rd != disc.denominator:
        return None
    root = Fraction(rn, rd)
    out = []
    for lam in ((tr - root) / 2, (tr + root) / 2):
        L = MultiPoly.const(lam, LOCAL)
        out.append((L, (b, L - a)))
    return out


def _quadratic_saddle(J, F: PointField):
    """Stable and unstable eigenvectors over ``Q(sqrt(disc))`` for a rational saddle."""
    if not F.is_rational:
        raise _Unresolved("saddle eigenvectors are irrational over an irrational point field")
    (a, b), (c, d) = [[v.constant_term() for v in row] for row in J]
    disc = (a - d) ** 2 + 4 * b * c
    root = [r for r, _ in real_roots([-disc, 0, 1]) if not isinstance(r, Fraction) and r.sign() > 0][0]
    E = PointField(root)
    t = E.generator()
    half = Fraction(1, 2)
    vecs = []
    for s in (-1, 1):
        lam = MultiPoly.const((a + d) * half, LOCAL) + t.scale(s * half)
        vecs.append(Direction(MultiPoly.const(b, LOCAL), lam - a, E))
    return vecs[0], vecs[1]


def _elementary(loc: _Local, order: int) -> dict:
    """Classify from the linear part; returns a dict with ``kind`` and, when
    terminal, ``items`` (ccw portrait)."""
    F = loc.field
    J = loc.J()
    (a, b), (c, d) = J
    det = F.reduce(a * d - b * c)
    tr = F.reduce(a + d)
    sdet, str_ = F.sign(det), F.sign(tr)
    info = {"J": J, "det_sign": sdet, "trace_sign": str_}
    if sdet == 0 and str_ == 0:
        zero = all(F.is_zero(v) for row in J for v in row)
        info["kind"] = "LinearlyZero" if zero else "Nilpotent"
        return info
    grads = _mark_gradients(loc)
    if sdet < 0:
        info["kind"] = "HyperbolicSaddle"
        pairs = _eigenpairs(J, F)
        if pairs is not None:
            (l1, v1), (l2, v2) = pairs
            if F.sign(l1) > 0:
                (l1, v1), (l2, v2) = (l2, v2), (l1, v1)
            ein = Direction(v1[0], v1[1], F)
            eout = Direction(v2[0], v2[1], F)
        else:
            ein, eout = _quadratic_saddle(J, F)
        dirs = _four_directions(ein, eout)
        roles = [("sep", "in"), ("sep", "out"), ("sep", "in"), ("sep", "out")]
        info["items"] = _cross_items(dirs, roles, grads)
        return info
    if sdet > 0:
        disc = F.reduce(tr * tr - det.scale(4))
        orient = "in" if str_ < 0 else "out"
        info["stability"] = "stable" if str_ < 0 else ("unstable" if str_ > 0 else None)
        if str_ != 0 and F.sign(disc) >= 0:
            info["kind"] = "HyperbolicNode"
            info["items"] = _node_items(loc, orient, grads)
        else:
            info["kind"] = "HyperbolicFocusOrCenter"
            info["weak"] = str_ == 0
            info["monodromic"] = True
            info["items"] = []
        return info
    # semi-hyperbolic
    red = _semi_hyperbolic(loc, J, order)
    info.update({"m": red["m"], "a_m_sign": red["a_m_sign"], "lambda_sign": red["lambda_sign"]})
    lam_s, am_s, m = red["lambda_sign"], red["a_m_sign"], red["m"]
    horient = "out" if lam_s > 0 else "in"
    kdir = Direction(red["k"][0], red["k"][1], F)
    edir = Direction(red["e"][0], red["e"][1], F)
    dirs = _four_directions(kdir, edir)
    if m % 2:
        if am_s * lam_s < 0:
            info["kind"] = "SemiHyperbolicSaddle"
            corient = "in" if am_s < 0 else "out"
            roles = [("sep", corient), ("sep", horient), ("sep", corient), ("sep", horient)]
            info["items"] = _cross_items(dirs, roles, grads)
        else:
            info["kind"] = "SemiHyperbolicNode"
            info["stability"] = "stable" if lam_s < 0 else "unstable"
            info["items"] = _node_items(loc, horient, grads)
        return info
    info["kind"] = "SemiHyperbolicSaddleNode"
    # on the side u > 0 the center flow is outward iff a_m > 0; on u < 0 inward iff a_m > 0
    plus = "out" if am_s > 0 else "in"
    minus = _flip(plus)
    roles = []
    for dd in dirs:
        if dd is edir or dd.cross(edir) == 0:
            roles.append(("sep", horient))
        else:
            side = plus if _same_half(dd, kdir) else minus
            roles.append(("nodal", horient) if side == horient else ("sep", side))
    info["items"] = _cross_items(dirs, roles, grads)
    return info


# ---------------------------------------------------------------------------
# blow-up driver


class _Counter:
    def __init__(self):
        self.n = 0

    def next(self) -> str:
        self.n += 1
        return f"divisor{self.n}"


def _poly_twist(G: MultiPoly, times: int) -> MultiPoly:
    x = MultiPoly.var("x", LOCAL)
    y = MultiPoly.var("y", LOCAL)
    return G.substitute({"x": x - y.scale(times)})


def _strict(G: MultiPoly) -> MultiPoly:
    x = MultiPoly.var("x", LOCAL)
    y = MultiPoly.var("y", LOCAL)
    H = G.substitute({"y": x * y})
    k = H.content_monomial_power("x")
    return H.divide_by_monomial({"x": k}) if k else H


def _split(items: list, label: str):
    idx = [i for i, it in enumerate(items) if isinstance(it, Separatrix) and label in it.labels]
    if len(idx) != 2:
        raise _Unresolved(f"expected two divisor branches through a divisor point, found {len(idx)}")
    up = [i for i in idx if items[i].direction is not None and items[i].direction.sign_dy() > 0]
    down = [i for i in idx if items[i].direction is not None and items[i].direction.sign_dy() < 0]
    if len(up) != 1 or len(down) != 1:
        raise _Unresolved("cannot orient the divisor branches")
    n = len(items)
    u, dn = up[0], down[0]
    right, left = [], []
    i = (dn + 1) % n
    while i != u:
        right.append(items[i])
        i = (i + 1) % n
    i = (u + 1) % n
    while i != dn:
        left.append(items[i])
        i = (i + 1) % n
    return right, left


def _resolve(loc: _Local, depth: int, order: int, counter: _Counter, trace: list) -> dict:
    info = _elementary(loc, order)
    if "items" in info:
        return info
    if depth <= 0:
        raise _Unresolved("blow-up depth exhausted")
    if not loc.field.is_rational:
        raise _Unresolved("blow-up at an irrational point is not supported")
    P, Q, marks = loc.P, loc.Q, list(loc.marks)
    sysl = PlanarSystem(P, Q)
    cf = characteristic_form(sysl)
    twists = 0
    if not cf.dicritical:
        while cf.x_is_characteristic():
            if twists == 3:
                raise _Unresolved("vertical direction stays characteristic after three twists")
            sysl = twist(sysl)
            marks = [(l, _poly_twist(G, 1)) for l, G in marks]
            twists += 1
            trace.append({"op": "twist"})
            cf = characteristic_form(sysl)
    blown = vertical_blowup(sysl)
    m = max_rescale_power(blown)
    blown = time_rescale(blown, m)
    trace.append({"op": "vertical_blowup"})
    trace.append({"op": "time_rescale", "power": m})
    label = counter.next()
    x = MultiPoly.var("x", LOCAL)
    marks1 = [(l, _strict(G)) for l, G in marks] + [(label, x)]
    P1, Q1 = blown.P, blown.Q
    right_parts, left_parts = [], []
    if P1.content_monomial_power("x") == 0:
        # the divisor is not invariant: orbits cross it
        T = P1.substitute({"x": 0})
        if T.degree_in("y") > 0 and real_roots(T):
            raise _Unresolved("orbits tangent to a non-invariant divisor")
        s = 1 if T.constant_term() > 0 else -1
        right = Sector("P", "out" if s > 0 else "in")
        left = Sector("P", "in" if s * (-1) ** m > 0 else "out")
        items = [right] if right == left else [right, left]
        trace.append({"op": "dicritical", "right": right.orient, "left": left.orient})
        return {"kind": info["kind"], "items": items, "J": info["J"], "dicritical": True}
    R = Q1.substitute({"x": 0})
    if R.is_zero():
        raise _Unresolved("the divisor is a line of equilibria after rescaling")
    roots = [] if R.is_constant() else real_roots(R)
    branches = []
    for s, _mult in roots:
        fld = PointField(s)
        y = MultiPoly.var("y", LOCAL)
        sub = {"y": y + fld.generator()}
        P2 = fld.reduce(P1.substitute(sub))
        Q2 = fld.reduce(Q1.substitute(sub))
        lm = []
        for l, G in marks1:
            G2 = fld.reduce(G.substitute(sub))
            if fld.is_zero(G2.homogeneous_component(0, XY)):
                lm.append((l, G2 - G2.homogeneous_component(0, XY)))
        sub_trace = []
        sub_info = _resolve(_Local(P2, Q2, fld, lm), depth - 1, order, counter, sub_trace)
        if sub_info.get("monodromic"):
            raise _Unresolved("monodromic point on an invariant divisor")
        right, left = _split(sub_info["items"], label)
        rdir = Direction.of(1, fld.generator(), fld).linear(1, -twists, 0, 1)
        ldir = -rdir
        right = [it.moved(rdir) if isinstance(it, Separatrix) else it for it in right]
        left = [it.moved(ldir) if isinstance(it, Separatrix) else it for it in left]
        if m % 2:
            left = [it.flipped() for it in left]
        right_parts.append(right)
        left_parts.append(list(reversed(left)))
        branches.append({"y": fld.describe(), "kind": sub_info["kind"],
                         "portrait": " ".join(str(i) for i in sub_info["items"]),
                         "trace": sub_trace})
    trace.append({"op": "divisor", "label": label, "points": branches})
    if not roots:
        return {"kind": info["kind"], "items": [], "monodromic": True, "J": info["J"]}
    flat = [it for part in right_parts + left_parts for it in part]
    if (not any(isinstance(it, Separatrix) for it in flat)
            and all(it.kind == "H" for it in flat)):
        # no orbit leaves the divisor toward the point: orbits turn around it
        return {"kind": info["kind"], "items": [], "monodromic": True, "J": info["J"]}
    items = _glue(flat)
    return {"kind": info["kind"], "items": items, "J": info["J"]}


# ---------------------------------------------------------------------------
# public API


@dataclass
class EquilibriumReport:
    point: tuple
    linear_part: list
    kind: str
    stability: str | None = None
    sectors: SectorSequence | None = None
    trace: list = field(default_factory=list)
    reason: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def resolved(self) -> bool:
        return self.kind != "Unresolved"

    def to_json(self) -> dict:
        return {
            "point": [_coord_json(c) for c in self.point],
            "linear_part": self.linear_part,
            "kind": self.kind,
            "stability": self.stability,
            "sectors": self.sectors.to_json() if self.sectors is not None else None,
            "trace": self.trace,
            "reason": self.reason,
            "details": self.details,
        }


def _coord_json(c):
    if isinstance(c, AlgebraicNumber):
        iv = c.interval
        return {"poly": [str(v) for v in c.poly], "interval": [str(iv.lo), str(iv.hi)],
                "approx": float(c)}
    return str(Fraction(c))


def _linear_json(loc: _Local, J) -> list:
    F = loc.field
    if F.is_rational:
        return [[str(v.constant_term()) for v in row] for row in J]
    return [[F.approx(v) for v in row] for row in J]


def _mark_polys(marks):
    if not marks:
        return {}
    out = {}
    for label, G in marks.items():
        if isinstance(G, str):
            G = parse(G, LOCAL)
        out[label] = G
    return out


def _report(loc, point, info, trace, reason=None) -> EquilibriumReport:
    J = info.get("J") or loc.J()
    sectors = None
    if "items" in info:
        sectors = SectorSequence(tuple(info["items"]), bool(info.get("monodromic")))
    details = {k: v for k, v in info.items()
               if k in ("m", "a_m_sign", "lambda_sign", "det_sign", "trace_sign", "weak", "dicritical")}
    return EquilibriumReport(point, _linear_json(loc, J), info["kind"], info.get("stability"),
                             sectors, trace, reason, details)


def classify(sys: PlanarSystem, point=(0, 0), order: int = DEFAULT_SERIES_ORDER,
             marks=None) -> EquilibriumReport:
    """Classify the equilibrium ``point`` from its linear part.

    Linearly zero and nilpotent points are reported as such without blowing up;
    use :func:`resolve_local_portrait` for those.
    """
    loc = _local_from(sys, point, _mark_polys(marks))
    try:
        info = _elementary(loc, order)
    except _Unresolved as exc:
        return _report(loc, point, {"kind": "Unresolved"}, [], exc.reason)
    return _report(loc, point, info, [])


def resolve_local_portrait(sys: PlanarSystem, point=(0, 0), depth: int = DEFAULT_DEPTH,
                           order: int = DEFAULT_SERIES_ORDER, marks=None) -> EquilibriumReport:
    """Sector sequence of an equilibrium, blowing up degenerate points up to ``depth`` times.

    ``marks`` maps labels to invariant curves ``G(x, y) = 0`` through the point
    (in the coordinates of ``sys``); separatrices lying on them carry the label.
    """
    loc = _local_from(sys, point, _mark_polys(marks))
    trace: list = []
    try:
        info = _resolve(loc, depth, order, _Counter(), trace)
    except _Unresolved as exc:
        return _report(loc, point, {"kind": "Unresolved"}, trace, exc.reason)
    return _report(loc, point, info, trace)
