"""Lyapunov constants of a planar system with a rotation linear part.

A truncated formal first integral ``H = (x^2+y^2)/2 + H_3 + H_4 + ...`` is
built degree by degree.  At odd degree ``i`` the homogeneous equation
``D(H_i) = -R_i`` (``D`` is the derivative along the linear rotation, ``R_i``
collects the contributions of already known lower-order pieces) has a unique
solution.  At even degree ``i = 2j`` the operator ``D`` has the kernel
``(x^2+y^2)^j``; the system is closed with the extra unknown ``L_j`` on the
monomial ``(x^2+y^2)^j`` and the normalization "coefficient of ``x^i`` in
``H_i`` is zero".  Hence, for every computed degree,

    dH/dt = sum_j L_j (x^2+y^2)^j  + (terms of higher degree).

Clockwise inputs (linear part ``(y, -x)``) are time-reversed first, so the
constants always refer to the counterclockwise orientation.  With this
indexing the quintic family ``x' = y, y' = -x + sum a_i x^i y^(5-i)``
has ``L_1 = 0`` and ``L_3 = -(5 a0 + a4 + a2)/16``; all even-index constants
vanish identically for that family because its nonlinearity has odd degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .linalg import SingularMatrixError, bareiss_inverse
from .polyalg import CANONICAL, MultiPoly, PolyError, parse
from .polyalg.poly import FIELD_BITS

XY = ("x", "y")


class LyapunovError(ValueError):
    pass


@dataclass(frozen=True)
class PlanarSystem:
    """The vector field ``(x', y') = (P, Q)``; coefficients may involve parameters."""

    P: MultiPoly
    Q: MultiPoly

    def __post_init__(self):
        if self.P.table != self.Q.table:
            raise PolyError("P and Q live over different variable tables")

    @classmethod
    def from_strings(cls, P: str, Q: str, table=CANONICAL) -> "PlanarSystem":
        return cls(parse(P, table), parse(Q, table))

    @property
    def table(self):
        return self.P.table

    @property
    def degree(self) -> int:
        return max(self.P.degree(XY), self.Q.degree(XY))

    def linear_part(self) -> tuple:
        """``((dP/dx, dP/dy), (dQ/dx, dQ/dy))`` at the origin, as polynomials in the parameters."""
        rows = []
        for f in (self.P, self.Q):
            lin = f.homogeneous_component(1, XY)
            rows.append((lin.coefficient_in(XY, (1, 0)), lin.coefficient_in(XY, (0, 1))))
        return tuple(rows)

    def evaluate(self, params) -> "PlanarSystem":
        return PlanarSystem(self.P.evaluate(params), self.Q.evaluate(params))

    def substitute(self, bindings) -> "PlanarSystem":
        return PlanarSystem(self.P.substitute(bindings), self.Q.substitute(bindings))

    def parameters(self) -> list:
        return sorted(set(self.P.variables() + self.Q.variables()) - set(XY))

    def __str__(self) -> str:
        return f"x' = {self.P}, y' = {self.Q}"


def quintic_family(table=CANONICAL) -> PlanarSystem:
    """``x' = y, y' = -x + a0 y^5 + a1 x y^4 + ... + a5 x^5`` with symbolic ``a_i``."""
    q = "-x + " + " + ".join(f"a{i}*x^{i}*y^{5 - i}" for i in range(6))
    return PlanarSystem.from_strings("y", q, table)


def rotation_sign(sys: PlanarSystem) -> int:
    """+1 for linear part ``(-y, x)``, -1 for ``(y, -x)``; raises otherwise."""
    (pxx, pxy), (qxx, qxy) = sys.linear_part()
    for e in (pxx, qxy):
        if not e.is_zero():
            raise LyapunovError("linear part is not a pure rotation")
    if pxy == -1 and qxx == 1:
        return 1
    if pxy == 1 and qxx == -1:
        return -1
    raise LyapunovError(
        f"linear part must be (-y, x) or (y, -x); got dP/dy={pxy}, dQ/dx={qxx}"
    )


@lru_cache(maxsize=None)
def _rotation_matrix(i: int, s: int) -> tuple:
    """Matrix of ``h -> s*(-y h_x + x h_y)`` on degree-``i`` forms.

    Column ``l`` is the monomial ``x^(i-l) y^l``; row ``r`` the coefficient of
    ``x^(i-r) y^r``.
    """
    n = i + 1
    a = [[Fraction(0)] * n for _ in range(n)]
    for l in range(n):
        if i - l:
            a[l + 1][l] += -s * (i - l)
        if l:
            a[l - 1][l] += s * l
    return tuple(tuple(r) for r in a)


@lru_cache(maxsize=None)
def _solver(i: int, s: int) -> tuple:
    """Inverse of the degree-``i`` system (augmented with ``L`` when ``i`` is even)."""
    base = [list(r) for r in _rotation_matrix(i, s)]
    n = i + 1
    if i % 2:
        try:
            return tuple(tuple(r) for r in bareiss_inverse(base))
        except SingularMatrixError:
            raise LyapunovError(f"odd-degree system {i} is singular") from None
    # unknowns q_0..q_i, L ; equations: n coefficient rows + normalization q_0 = 0
    j = i // 2
    circle = [Fraction(0)] * n
    from math import comb

    for k in range(j + 1):
        circle[2 * k] = Fraction(comb(j, k))
    rows = [base[r] + [-circle[r]] for r in range(n)]
    rows.append([Fraction(1)] + [Fraction(0)] * n)
    return tuple(tuple(r) for r in bareiss_inverse(rows))


@dataclass
class FormalIntegral:
    """Homogeneous pieces ``H_p`` (as polynomials in x, y and parameters) of the truncated integral."""

    order: int
    pieces: dict = field(default_factory=dict)

    def coefficient(self, p: int, l: int) -> MultiPoly:
        """``q_{p-l,l}``: the coefficient of ``x^(p-l) y^l`` in ``H_p``."""
        return self.pieces[p].coefficient_in(XY, (p - l, l))

    def total(self) -> MultiPoly:
        out = None
        for p in sorted(self.pieces):
            out = self.pieces[p] if out is None else out + self.pieces[p]
        return out


@dataclass
class LyapunovSequence:
    entries: list
    reduced: list
    integral: FormalIntegral | None = None

    def __getitem__(self, j: int) -> MultiPoly:
        for k, p in self.entries:
            if k == j:
                return p
        raise KeyError(j)

    def indices(self) -> list:
        return [k for k, _ in self.entries]

    def odd(self) -> list:
        return [(k, p) for k, p in self.entries if k % 2]


def _monomial(table, i, j):
    return (i << 0) | (j << FIELD_BITS)


def formal_integral(sys: PlanarSystem, top_degree: int):
    """Solve for ``H_3..H_top`` and the constants on every even degree up to ``top_degree``.

    Returns ``(FormalIntegral, {j: L_j})``.
    """
    s = rotation_sign(sys)
    if s < 0:
        # constants are reported for the counterclockwise (-y, x) orientation
        sys = PlanarSystem(-sys.P, -sys.Q)
        s = 1
    table = sys.table
    if table.names[:2] != XY:
        raise PolyError("planar systems must use x, y as the first two table variables")
    n = sys.degree
    Pk = {k: sys.P.homogeneous_component(k, XY) for k in range(2, n + 1)}
    Qk = {k: sys.Q.homogeneous_component(k, XY) for k in range(2, n + 1)}
    Pk = {k: v for k, v in Pk.items() if v}
    Qk = {k: v for k, v in Qk.items() if v}
    for k in range(0, 1):
        if sys.P.homogeneous_component(0, XY) or sys.Q.homogeneous_component(0, XY):
            raise LyapunovError("the origin is not an equilibrium")

    H = FormalIntegral(order=top_degree)
    H.pieces[2] = parse("x^2/2 + y^2/2", table)
    grads = {2: (H.pieces[2].diff("x"), H.pieces[2].diff("y"))}
    L = {1: MultiPoly.zero(table)}
    for i in range(3, top_degree + 1):
        R = MultiPoly.zero(table)
        for k in set(Pk) | set(Qk):
            j = i - k + 1
            if j < 2 or j not in grads:
                continue
            hx, hy = grads[j]
            if k in Pk and hx:
                R = R + Pk[k] * hx
            if k in Qk and hy:
                R = R + Qk[k] * hy
        rows = R.collect(XY)
        rhs = [-rows.get((i - r, r), MultiPoly.zero(table)) for r in range(i + 1)]
        inv = _solver(i, s)
        if i % 2 == 0:
            rhs.append(MultiPoly.zero(table))
        sol = []
        for row in inv:
            acc: dict = {}
            for c, b in zip(row, rhs):
                if c and b:
                    for m, v in b.items():
                        acc[m] = acc.get(m, 0) + c * v
            sol.append(MultiPoly(table, acc))
        Hi = {}
        for l in range(i + 1):
            mono = _monomial(table, i - l, l)
            for m, v in sol[l].items():
                Hi[m + mono] = v
        piece = MultiPoly(table, Hi)
        if piece:
            H.pieces[i] = piece
            grads[i] = (piece.diff("x"), piece.diff("y"))
        if i % 2 == 0:
            L[i // 2] = sol[i + 1]
    return H, L


def derivative_residual(sys: PlanarSystem, H: FormalIntegral, L: dict) -> MultiPoly:
    """``dH/dt - sum L_j (x^2+y^2)^j`` restricted to degrees ``<= H.order``."""
    if rotation_sign(sys) < 0:
        sys = PlanarSystem(-sys.P, -sys.Q)
    h = H.total()
    d = h.diff("x") * sys.P + h.diff("y") * sys.Q
    r2 = parse("x^2 + y^2", sys.table)
    for j, lj in L.items():
        if lj:
            d = d - lj * r2 ** j
    out = MultiPoly.zero(sys.table)
    for k in range(H.order + 1):
        out = out + d.homogeneous_component(k, XY)
    return out


def lyapunov_constants(sys: PlanarSystem, count: int, reduce: bool = False,
                       order=None) -> LyapunovSequence:
    """``L_1 .. L_count``; with ``reduce`` each odd constant is replaced by its normal
    form modulo a Groebner basis of the earlier odd constants."""
    if count < 1:
        raise LyapunovError("count must be at least 1")
    H, L = formal_integral(sys, 2 * count + 2)
    entries = [(j, L.get(j, MultiPoly.zero(sys.table))) for j in range(1, count + 1)]
    flags = [False] * len(entries)
    if reduce:
        from .ideals import buchberger, normal_form, MonomialOrder

        order = order or MonomialOrder.parameters_first_a0()
        earlier = []
        out = []
        for (j, p), _ in zip(entries, flags):
            if j % 2 and earlier:
                gb = buchberger(earlier, order)
                p = normal_form(p, gb)
                out.append((j, p, True))
            else:
                out.append((j, p, False))
            if j % 2 and p:
                earlier.append(p)
        entries = [(j, p) for j, p, _ in out]
        flags = [f for _, _, f in out]
    return LyapunovSequence(entries=entries, reduced=flags, integral=H)


def bautin_inclusion_check(seq: LyapunovSequence, order=None) -> dict:
    """For every even ``2j`` check ``L_2, ..., L_2j`` lie in ``<L_3, ..., L_{2j-1}>``."""
    from .ideals import buchberger, normal_form, MonomialOrder

    order = order or MonomialOrder.parameters_first_a0()
    idx = seq.indices()
    failures = []
    checked = []
    for e in idx:
        if e % 2 or e < 2:
            continue
        odd = [seq[k] for k in idx if k % 2 and 3 <= k <= e - 1 and seq[k]]
        evens = [seq[k] for k in idx if k % 2 == 0 and k <= e]
        if all(p.is_zero() for p in evens):
            checked.append(e)
            continue
        if not odd:
            failures.append(e)
            continue
        gb = buchberger(odd, order)
        if any(normal_form(p, gb) for p in evens):
            failures.append(e)
        checked.append(e)
    return {"checked": checked, "failures": failures, "ok": not failures}


def reversibility_test(sys: PlanarSystem) -> str:
    """``'x-axis'`` if invariant under ``(x, y, t) -> (x, -y, -t)``, ``'y-axis'`` for
    ``(x, y, t) -> (-x, y, -t)``, ``'both'`` when both hold, else ``'none'``."""

    def parity(p: MultiPoly, v: str) -> set:
        k = p.table.var_index(v)
        return {p.table.exponent(m, k) % 2 for m, _ in p.items()}

    x_axis = parity(sys.P, "y") <= {1} and parity(sys.Q, "y") <= {0}
    y_axis = parity(sys.P, "x") <= {0} and parity(sys.Q, "x") <= {1}
    if x_axis and y_axis:
        return "both"
    if x_axis:
        return "x-axis"
    if y_axis:
        return "y-axis"
    return "none"


def weak_focus_order(sys: PlanarSystem, max_n: int = 9):
    """Index of the first nonzero constant at numeric parameters, or ``'center-candidate'``."""
    if sys.parameters():
        raise LyapunovError(f"parameters {sys.parameters()} are not bound")
    _, L = formal_integral(sys, 2 * max_n)
    for j in range(1, max_n + 1):
        v = L.get(j)
        if v is not None and v:
            return j, v.constant_value()
    return "center-candidate", Fraction(0)
