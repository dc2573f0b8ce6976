"""Center and global-center decisions for the quintic family.

The family is ``x' = y, y' = -x + sum a_i x^i y^(5-i)``.  Two procedures are
offered for the global center question.

* ``theorem`` mode evaluates the closed-form predicate
  ``a0 = a1 = a2 = a4 = 0, a3 <= 0, a5 <= 0``.
* ``pipeline`` mode checks the hypotheses of the Poincare-disc criterion
  directly: the origin is a center, it is the only finite equilibrium, the
  circle at infinity is not a line of equilibria, and every infinite
  equilibrium consists of exactly two hyperbolic sectors whose separatrices
  all lie on the circle at infinity.  Each step is computed from scratch
  (resultants, Lyapunov constants, charts, blow-ups).

An unresolved blow-up makes the pipeline answer ``None`` ("undecided"); it
never falls back on the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction

from .compactify import chart_system, infinite_equilibria
from .desing import PointField, resolve_local_portrait
from .linalg import determinant
from .lyapunov import XY, PlanarSystem, quintic_family, reversibility_test, weak_focus_order
from .polyalg import AlgebraicNumber, MultiPoly, real_roots
from .polyalg.roots import gcd_poly

INFINITY = "infinity"


class GlobalCenterError(ValueError):
    pass


class PositiveDimensional(GlobalCenterError):
    """The equilibrium set contains a curve."""


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class FamilyParameters:
    """``a_i`` is the coefficient of ``x^i y^(5-i)`` in ``y'``."""

    a0: Fraction = Fraction(0)
    a1: Fraction = Fraction(0)
    a2: Fraction = Fraction(0)
    a3: Fraction = Fraction(0)
    a4: Fraction = Fraction(0)
    a5: Fraction = Fraction(0)

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, Fraction(getattr(self, f.name)))

    @classmethod
    def parse(cls, text: str) -> "FamilyParameters":
        """Read ``"a3=-1,a5=-1/2"``; omitted coefficients are zero."""
        vals = {}
        text = text.strip()
        if not text:
            return cls()
        for item in text.split(","):
            if "=" not in item:
                raise GlobalCenterError(f"expected name=value, got {item!r}")
            k, v = (s.strip() for s in item.split("=", 1))
            if k not in {f.name for f in fields(cls)}:
                raise GlobalCenterError(f"unknown parameter {k!r}; expected a0..a5")
            try:
                vals[k] = Fraction(v)
            except (ValueError, ZeroDivisionError) as exc:
                raise GlobalCenterError(f"bad value for {k}: {v!r}") from exc
        return cls(**vals)

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyParameters":
        return cls(**{k: Fraction(str(v)) for k, v in d.items()})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self.as_dict().items()}

    def system(self) -> PlanarSystem:
        return quintic_family().evaluate(self.as_dict())


# ---------------------------------------------------------------------------
# finite equilibria


def _dense_y(p: MultiPoly, x0) -> list:
    """Coefficients in ``y`` of ``p(x0, y)`` for rational ``x0``."""
    q = p.substitute({"x": x0})
    if q.is_zero():
        return []
    return q.univariate_coeffs("y") if q.degree_in("y") > 0 else [q.constant_term()]


def _sylvester(a: list, b: list) -> list:
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + list(reversed(a)) + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + list(reversed(b)) + [Fraction(0)] * (size - n - 1 - i))
    return rows


def _interpolate(xs: list, ys: list) -> list:
    """Newton interpolation; dense coefficients, lowest degree first."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)]
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        nxt = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] += c
            nxt[k] -= c * xs[i]
        nxt[0] += coef[i]
        poly = nxt
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def resultant_y(P: MultiPoly, Q: MultiPoly) -> list:
    """``Res_y(P, Q)`` as a dense polynomial in ``x`` by evaluation and interpolation."""
    dp, dq = P.degree_in("y"), Q.degree_in("y")
    if dp < 0 or dq < 0:
        return []
    bound = max(dp, 0) * max(Q.degree(XY), 0) + max(dq, 0) * max(P.degree(XY), 0) + 1
    xs, ys = [], []
    k = 0
    while len(xs) < bound:
        x0 = Fraction(k // 2 + 1) * (1 if k % 2 == 0 else -1) if k else Fraction(0)
        k += 1
        a = _dense_y(P, x0)
        b = _dense_y(Q, x0)
        a = a + [Fraction(0)] * (dp + 1 - len(a))
        b = b + [Fraction(0)] * (dq + 1 - len(b))
        if dp == 0:
            val = a[0] ** dq
        elif dq == 0:
            val = b[0] ** dp
        else:
            val = determinant(_sylvester(a, b))
        xs.append(x0)
        ys.append(Fraction(val))
    return _interpolate(xs, ys)


@dataclass(frozen=True)
class FinitePoint:
    x: object  # Fraction or AlgebraicNumber
    y: object

    def to_json(self) -> list:
        return [_coord(self.x), _coord(self.y)]

    def approx(self) -> tuple:
        return (float(self.x), float(self.y))


def _coord(c):
    if isinstance(c, AlgebraicNumber):
        iv = c.interval
        return {"poly": [str(v) for v in c.poly], "interval": [str(iv.lo), str(iv.hi)],
                "approx": float(c)}
    return str(c)


def _y_roots_at_algebraic(P: MultiPoly, Q: MultiPoly, x0: AlgebraicNumber) -> list:
    """Common ``y`` roots over ``Q(x0)`` when their gcd is linear with a rational root."""
    from .desing import LOCAL

    fld = PointField(x0)
    t = fld.generator()

    def coeffs(p):
        q = fld.reduce(p.to_table(LOCAL).substitute({"x": t}))
        d = q.degree_in("y")
        return [fld.reduce(q.coefficient_in(("y",), (k,))) for k in range(max(d, 0) + 1)] if q else []

    def trim(c):
        while c and fld.is_zero(c[-1]):
            c = c[:-1]
        return c

    def rem(a, b):
        inv = fld.inverse(b[-1])
        while a and len(a) >= len(b):
            f = fld.reduce(a[-1] * inv)
            s = len(a) - len(b)
            a = trim([fld.reduce(a[i] - f * b[i - s]) if i >= s else a[i] for i in range(len(a))])
        return a

    a, b = trim(coeffs(P)), trim(coeffs(Q))
    while b:
        a, b = b, rem(a, b)
    if not a or len(a) == 1:
        return []
    if len(a) > 2:
        inv = fld.inverse(a[-1])
        mon = [fld.reduce(c * inv) for c in a]
        if any(c.degree_in("t") > 0 for c in mon):
            raise GlobalCenterError("common factor of degree > 1 over an algebraic abscissa is unsupported")
        return [r for r, _ in real_roots([c.constant_term() for c in mon])]
    root = fld.reduce(-a[0] * fld.inverse(a[1]))
    if root.degree_in("t") <= 0:
        return [root.constant_term()]
    return [_as_algebraic(fld, root)]


def _as_algebraic(fld: PointField, r: MultiPoly):
    """The real number ``r(t)`` as an isolated root of ``Res_t(m(t), Y - r(t))``."""
    from .desing import LOCAL

    X = MultiPoly.var("x", LOCAL)
    m = MultiPoly.from_univariate(fld.m, "y", LOCAL)
    lin = X - r.substitute({"t": MultiPoly.var("y", LOCAL)})
    res = resultant_y(m, lin)
    for cand, _ in real_roots(res):
        if isinstance(cand, Fraction):
            if fld.is_zero(r - cand):
                return cand
            continue
        lo, hi = cand.interval.lo, cand.interval.hi
        if fld.sign(r - lo) > 0 and fld.sign(r - hi) <= 0:
            return cand
    raise GlobalCenterError("failed to isolate an algebraic ordinate")


def finite_equilibria(sys: PlanarSystem) -> list:
    """All real solutions of ``P = Q = 0``, sorted by ``x`` then ``y``.

    Raises :class:`PositiveDimensional` when ``P`` and ``Q`` share a
    nonconstant factor.
    """
    if sys.parameters():
        raise GlobalCenterError(f"parameters {sys.parameters()} must be bound to numbers")
    P, Q = sys.P, sys.Q
    if P.is_zero() or Q.is_zero():
        raise PositiveDimensional("one component vanishes identically")
    swap = False
    if P.degree_in("y") <= 0 and Q.degree_in("y") <= 0:
        swap = True
        table = P.table
        P = P.substitute({"x": MultiPoly.var("y", table), "y": MultiPoly.var("x", table)})
        Q = Q.substitute({"x": MultiPoly.var("y", table), "y": MultiPoly.var("x", table)})
    res = resultant_y(P, Q)
    if not res:
        raise PositiveDimensional("the resultant vanishes identically")
    pts = []
    if len(res) == 1:
        return pts
    for x0, _m in real_roots(res):
        if isinstance(x0, Fraction):
            a, b = _dense_y(P, x0), _dense_y(Q, x0)
            if not a and not b:
                raise PositiveDimensional(f"the line x = {x0} consists of equilibria")
            g = gcd_poly(a, b) if a and b else (a or b)
            if len(g) <= 1:
                continue
            for y0, _ in real_roots(g):
                pts.append(FinitePoint(x0, y0))
        else:
            for y0 in _y_roots_at_algebraic(P, Q, x0):
                pts.append(FinitePoint(x0, y0))
    if swap:
        pts = [FinitePoint(p.y, p.x) for p in pts]
    pts.sort(key=lambda p: (float(p.x), float(p.y)))
    return pts


def family_equilibria_closed_form(params: FamilyParameters) -> list:
    """``y = 0`` and ``x (a5 x^4 - 1) = 0``."""
    coeffs = [Fraction(0), Fraction(-1), 0, 0, 0, params.a5]
    return [FinitePoint(r, Fraction(0)) for r, _ in real_roots(coeffs)]


# ---------------------------------------------------------------------------
# center decision


CENTER_UNIQUE = "center-with-unique-equilibrium"
FOCUS = "focus"
CENTER_EXTRA = "center-but-extra-equilibria"


@dataclass
class CenterVerdict:
    verdict: str
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


def center_check(params: FamilyParameters, max_n: int = 9) -> CenterVerdict:
    """Three-way answer: center with the origin as only equilibrium, focus, or
    center with further equilibria.  Every branch is cross-checked."""
    sys = params.system()
    ev: dict = {"params": params.to_json()}
    if params.a0 == params.a2 == params.a4 == 0:
        sym = reversibility_test(sys)
        ev["reversibility"] = sym
        if sym not in ("x-axis", "both"):
            raise GlobalCenterError("reversibility cross-check failed")
        pts = finite_equilibria(sys)
        ev["finite_equilibria"] = [p.to_json() for p in pts]
        unique = params.a5 <= 0
        if unique != (len(pts) == 1):
            raise GlobalCenterError("equilibrium count disagrees with the sign of a5")
        return CenterVerdict(CENTER_UNIQUE if unique else CENTER_EXTRA, ev)
    j, value = weak_focus_order(sys, max_n)
    ev["weak_focus_order"] = j
    ev["first_nonzero_constant"] = str(value)
    if j == "center-candidate":
        ev["cross_check"] = f"no nonzero constant up to L_{max_n}"
    return CenterVerdict(FOCUS, ev)


# ---------------------------------------------------------------------------
# global center


def case_name(params: FamilyParameters) -> str:
    """Which branch of the infinite-equilibrium analysis a center-valid point falls in."""
    if params.a1 != 0:
        return "a1!=0"
    a3, a5 = params.a3, params.a5
    a_nonzero = a5 != 0
    if a3 > 0:
        return "c1" if a_nonzero else "c2"
    if a3 < 0:
        return "c3" if a_nonzero else "c4"
    return "c5" if a_nonzero else "c6"


def theorem_predicate(params: FamilyParameters) -> bool:
    p = params
    return p.a0 == p.a1 == p.a2 == p.a4 == 0 and p.a3 <= 0 and p.a5 <= 0


@dataclass
class GlobalCenterResult:
    verdict: bool | None
    mode: str
    evidence: dict = field(default_factory=dict)

    @property
    def undecided(self) -> bool:
        return self.verdict is None

    def to_json(self) -> dict:
        v = "undecided-by-pipeline" if self.verdict is None else self.verdict
        return {"verdict": v, "mode": self.mode, "evidence": self.evidence}


def infinite_portraits(sys: PlanarSystem, depth: int = 6) -> list:
    """Resolved local portraits of every infinite equilibrium in ``U1`` and at the origin of ``U2``."""
    out = []
    for pt in infinite_equilibria(sys):
        chart = chart_system(sys, pt.chart)
        rep = resolve_local_portrait(chart.system, (pt.x, 0), depth=depth, marks={INFINITY: "y"})
        out.append((pt, rep))
    return out


ESCAPE_SEEDS = ((1, 0), (2, 0), (3, 0), (5, 0))


def escape_evidence(sys: PlanarSystem, seeds=ESCAPE_SEEDS, max_steps: int = 20000) -> dict:
    """Numeric orbits from ``seeds`` until one escapes; summaries of all orbits tried."""
    from .portrait import PortraitError, integrate

    tried = []
    for seed in seeds:
        try:
            tr = integrate(sys, seed, max_steps=max_steps)
        except PortraitError as exc:
            tried.append({"seed": list(seed), "error": str(exc)})
            continue
        tried.append({"seed": list(seed), **tr.to_json()})
        if tr.verdict == "escaped":
            return {"escaped": True, "orbits": tried}
    return {"escaped": False, "orbits": tried}


def global_center_check(params: FamilyParameters, mode: str = "theorem",
                        depth: int = 6) -> GlobalCenterResult:
    if mode == "theorem":
        return GlobalCenterResult(theorem_predicate(params), mode,
                                  {"params": params.to_json(), "case": case_name(params)})
    if mode != "pipeline":
        raise GlobalCenterError(f"unknown mode {mode!r}; expected theorem or pipeline")
    ev: dict = {"params": params.to_json(), "case": case_name(params)}
    cv = center_check(params)
    ev["center_check"] = cv.to_json()
    if cv.verdict != CENTER_UNIQUE:
        ev["reason"] = "the origin is not a center" if cv.verdict == FOCUS else "extra finite equilibria"
        return GlobalCenterResult(False, mode, ev)
    sys = params.system()
    inf = infinite_equilibria(sys)
    if inf.line_of_equilibria:
        ev["reason"] = "the circle at infinity is filled with equilibria"
        return GlobalCenterResult(False, mode, ev)
    reports = []
    verdict: bool | None = True
    for pt, rep in infinite_portraits(sys, depth):
        ok = rep.sectors is not None and rep.sectors.two_hyperbolic_on(INFINITY)
        reports.append({"chart": pt.chart, "x": pt.coordinate_json(), "report": rep.to_json(),
                        "two_hyperbolic_on_infinity": ok})
        if not rep.resolved:
            if verdict is True:
                verdict = None
            continue
        if not ok:
            verdict = False
    ev["infinite_equilibria"] = reports
    if verdict is False:
        ev["reason"] = "orbits reach or leave infinity"
        ev["escape"] = escape_evidence(sys)
    elif verdict is None:
        ev["reason"] = "undecided-by-pipeline"
    return GlobalCenterResult(verdict, mode, ev)


__all__ = [
    "CENTER_EXTRA", "CENTER_UNIQUE", "FOCUS", "CenterVerdict", "FamilyParameters", "FinitePoint",
    "GlobalCenterError", "GlobalCenterResult", "escape_evidence", "PositiveDimensional", "case_name", "center_check",
    "family_equilibria_closed_form", "finite_equilibria", "global_center_check",
    "infinite_portraits", "resultant_y", "theorem_predicate",
]
