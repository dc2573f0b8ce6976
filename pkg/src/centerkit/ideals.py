"""Groebner bases over the rationals.

Buchberger's algorithm with the sugar selection strategy and the
Gebauer-Moeller pair criteria.  Internally a polynomial is a dict from packed
monomials (see :mod:`centerkit.polyalg.poly`) to ``gmpy2.mpq``; every basis
element is kept monic.  The public surface speaks :class:`MultiPoly` only.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .polyalg import PARAMETERS, MultiPoly, PolyError
from .polyalg.poly import FIELD_BITS, FIELD_MASK

_KEY_BITS = 20
_KEY_LIMIT = 1 << _KEY_BITS


class BudgetExhausted(RuntimeError):
    """A Groebner computation ran out of its step or wall-clock budget."""

    def __init__(self, reason: str, steps: int, elapsed: float):
        super().__init__(f"budget exhausted ({reason}) after {steps} steps, {elapsed:.1f}s")
        self.reason = reason
        self.steps = steps
        self.elapsed = elapsed


@dataclass(frozen=True)
class Budget:
    max_steps: int | None = None
    seconds: float | None = None


@dataclass(frozen=True)
class MonomialOrder:
    """``kind`` is ``'lex'``, ``'degrevlex'`` or ``'elim'``.

    ``priority`` lists variables from largest to smallest; table variables not
    listed rank below all listed ones, in table order.  ``elim`` compares the
    degree in ``priority[0]`` first and breaks ties with degrevlex on the rest,
    which is an elimination order for that variable.
    """

    kind: str = "degrevlex"
    priority: tuple = ("w", "a5", "a4", "a3", "a2", "a1", "a0")

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    @classmethod
    def parameters_first_a0(cls, kind: str = "degrevlex") -> "MonomialOrder":
        """Order with ``a0 > a1 > ... > a5`` (eliminates ``a0`` through ``L_3`` first)."""
        return cls(kind, ("w",) + PARAMETERS)

    def variables(self, table) -> list:
        names = [v for v in self.priority if v in table.index]
        names += [v for v in table.names if v not in names]
        return [table.index[v] for v in names]

    def keyfunc(self, table):
        """Integer key per packed monomial whose natural order is this monomial order."""
        idx = self.variables(table)
        kind = self.kind
        cache: dict = {}
        n = len(idx)
        shifts = [FIELD_BITS * i for i in idx]

        def key(m: int) -> int:
            k = cache.get(m)
            if k is not None:
                return k
            ex = [(m >> s) & FIELD_MASK for s in shifts]
            for e in ex:
                if e >= _KEY_LIMIT - 1:
                    raise PolyError("exponent too large for the Groebner order key")
            if kind == "lex":
                k = 0
                for e in ex:
                    k = (k << _KEY_BITS) | e
            elif kind == "degrevlex":
                k = sum(ex)
                for e in reversed(ex):
                    k = (k << _KEY_BITS) | (_KEY_LIMIT - 1 - e)
            else:
                rest = ex[1:]
                k = (ex[0] << _KEY_BITS) | sum(rest)
                for e in reversed(rest):
                    k = (k << _KEY_BITS) | (_KEY_LIMIT - 1 - e)
            cache[m] = k
            return k

        key.n = n
        return key

    def to_json(self) -> dict:
        return {"kind": self.kind, "priority": list(self.priority)}


DEFAULT_ORDER = MonomialOrder()


class _Poly:
    """Internal monic polynomial: term dict, leading monomial, sugar degree."""

    __slots__ = ("terms", "lm", "sugar", "tail")

    def __init__(self, terms: dict, lm: int, sugar: int):
        self.terms = terms
        self.lm = lm
        self.sugar = sugar
        self.tail = [(m, c) for m, c in terms.items() if m != lm]


def _to_internal(p: MultiPoly) -> dict:
    return {m: mpq(c.numerator, c.denominator) for m, c in p.items()}


def _from_internal(terms: dict, table) -> MultiPoly:
    return MultiPoly(table, {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in terms.items()})


def _divides(a: int, b: int, guard: int) -> bool:
    d = b - a
    return d >= 0 and not (d & guard)


def _lcm(a: int, b: int, nvars: int) -> int:
    out = 0
    for i in range(nvars):
        s = FIELD_BITS * i
        out |= max((a >> s) & FIELD_MASK, (b >> s) & FIELD_MASK) << s
    return out


def _total_degree(m: int, nvars: int) -> int:
    return sum((m >> (FIELD_BITS * i)) & FIELD_MASK for i in range(nvars))


class _Engine:
    def __init__(self, table, order: MonomialOrder, budget: Budget | None):
        self.table = table
        self.order = order
        self.key = order.keyfunc(table)
        self.guard = table.guard
        self.nvars = len(table)
        self.budget = budget or Budget()
        self.steps = 0
        self.t0 = time.monotonic()

    def tick(self):
        self.steps += 1
        b = self.budget
        if b.max_steps is not None and self.steps > b.max_steps:
            raise BudgetExhausted("steps", self.steps, time.monotonic() - self.t0)
        if b.seconds is not None and (self.steps & 63) == 0:
            el = time.monotonic() - self.t0
            if el > b.seconds:
                raise BudgetExhausted("wall-clock", self.steps, el)

    def leading(self, terms: dict) -> int:
        return max(terms, key=self.key)

    def make(self, terms: dict, sugar: int) -> _Poly:
        lm = self.leading(terms)
        lc = terms[lm]
        if lc != 1:
            inv = 1 / lc
            terms = {m: c * inv for m, c in terms.items()}
        return _Poly(terms, lm, sugar)

    def reduce(self, terms: dict, basis: Sequence[_Poly], full: bool = True):
        """Normal form of ``terms`` modulo ``basis``; returns ``(remainder, sugar_growth)``."""
        f = dict(terms)
        key = self.key
        guard = self.guard
        heap = [-key(m) for m in f]
        back = {key(m): m for m in f}
        heapq.heapify(heap)
        rem: dict = {}
        extra = 0
        while heap:
            k = -heapq.heappop(heap)
            m = back.get(k)
            if m is None or m not in f:
                continue
            c = f.pop(m)
            div = None
            for g in basis:
                d = m - g.lm
                if d >= 0 and not (d & guard):
                    div = g
                    break
            if div is None:
                rem[m] = c
                if not full:
                    rem.update(f)
                    return rem, extra
                continue
            self.tick()
            t = m - div.lm
            extra = max(extra, _total_degree(t, self.nvars) + div.sugar)
            for gm, gc in div.tail:
                nm = gm + t
                old = f.get(nm)
                if old is None:
                    f[nm] = -c * gc
                    nk = key(nm)
                    back[nk] = nm
                    heapq.heappush(heap, -nk)
                else:
                    v = old - c * gc
                    if v:
                        f[nm] = v
                    else:
                        del f[nm]
        return rem, extra

    def spoly(self, f: _Poly, g: _Poly):
        lcm = _lcm(f.lm, g.lm, self.nvars)
        tf, tg = lcm - f.lm, lcm - g.lm
        out: dict = {}
        for m, c in f.tail:
            out[m + tf] = c
        for m, c in g.tail:
            nm = m + tg
            v = out.get(nm, 0) - c
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
        sugar = max(f.sugar + _total_degree(tf, self.nvars), g.sugar + _total_degree(tg, self.nvars))
        return out, sugar


def _coprime(a: int, b: int, nvars: int) -> bool:
    for i in range(nvars):
        s = FIELD_BITS * i
        if (a >> s) & FIELD_MASK and (b >> s) & FIELD_MASK:
            return False
    return True


@dataclass
class GroebnerBasis:
    generators: list
    order: MonomialOrder
    reduced: bool = True
    steps: int = 0
    elapsed: float = 0.0
    cofactors: list | None = field(default=None, repr=False)

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroebnerBasis) and self.order == other.order
                and self.generators == other.generators)

    def leading_monomials(self) -> list:
        key = self.order.keyfunc(self.generators[0].table) if self.generators else None
        return [max((m for m, _ in g.items()), key=key) for g in self.generators]


def _update(eng: _Engine, G: list, B: list, h: _Poly, hidx: int):
    """Gebauer-Moeller update of the pair list ``B`` when ``h = G[hidx]`` joins the basis."""
    nv = eng.nvars
    guard = eng.guard
    C = [(i, _lcm(G[i].lm, h.lm, nv), _coprime(G[i].lm, h.lm, nv))
         for i in range(hidx) if G[i] is not None]
    D = []
    while C:
        i, lcm, cop = C.pop(0)
        if cop or not any(_divides(l2, lcm, guard) for _, l2, _ in C + D):
            D.append((i, lcm, cop))
    fresh = [(i, lcm) for i, lcm, cop in D if not cop]
    out = []
    for p in B:
        _, _, lcm_ij, i, j = p
        if (_divides(h.lm, lcm_ij, guard)
                and _lcm(G[i].lm, h.lm, nv) != lcm_ij
                and _lcm(G[j].lm, h.lm, nv) != lcm_ij):
            continue
        out.append(p)
    for i, lcm in fresh:
        g = G[i]
        sugar = max(g.sugar + _total_degree(lcm - g.lm, nv), h.sugar + _total_degree(lcm - h.lm, nv))
        out.append((sugar, eng.key(lcm), lcm, i, hidx))
    return out


def buchberger(gens: Sequence[MultiPoly], order: MonomialOrder = DEFAULT_ORDER,
               budget: Budget | None = None, stop_on_unit: bool = False) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = [g for g in gens if g]
    if not gens:
        return GroebnerBasis([], order)
    table = gens[0].table
    for g in gens:
        if g.table != table:
            raise PolyError("generators over different tables")
    eng = _Engine(table, order, budget)
    G: list = []
    B: list = []
    unit = None
    inputs = sorted((_to_internal(g) for g in gens), key=lambda t: eng.key(eng.leading(t)))
    for t in inputs:
        rem, _ = eng.reduce(t, [g for g in G if g is not None])
        if not rem:
            continue
        h = eng.make(rem, max(_total_degree(m, eng.nvars) for m in rem))
        G.append(h)
        B = _update(eng, G, B, h, len(G) - 1)
        if h.lm == 0:
            unit = h
            break
    while B and unit is None:
        best = min(range(len(B)), key=lambda k: (B[k][0], B[k][1]))
        sugar, _, _, i, j = B.pop(best)
        sp, s_sugar = eng.spoly(G[i], G[j])
        eng.tick()
        if not sp:
            continue
        rem, grown = eng.reduce(sp, [g for g in G if g is not None])
        if not rem:
            continue
        h = eng.make(rem, max(s_sugar, grown))
        G.append(h)
        B = _update(eng, G, B, h, len(G) - 1)
        if h.lm == 0:
            unit = h
            if stop_on_unit:
                break
    if unit is not None:
        one = MultiPoly.const(1, table)
        return GroebnerBasis([one], order, True, eng.steps, time.monotonic() - eng.t0)
    basis = _interreduce(eng, [g for g in G if g is not None])
    out = [_from_internal(g.terms, table) for g in basis]
    return GroebnerBasis(out, order, True, eng.steps, time.monotonic() - eng.t0)


def _interreduce(eng: _Engine, G: list) -> list:
    # minimal basis: drop elements whose leading monomial is divisible by another's
    G = sorted(G, key=lambda g: eng.key(g.lm))
    minimal = []
    for g in G:
        if not any(_divides(h.lm, g.lm, eng.guard) for h in minimal):
            minimal.append(g)
    out = []
    for i, g in enumerate(minimal):
        others = [h for j, h in enumerate(minimal) if j != i]
        tail = {m: c for m, c in g.terms.items() if m != g.lm}
        rem, _ = eng.reduce(tail, others)
        rem[g.lm] = mpq(1)
        out.append(_Poly(rem, g.lm, g.sugar))
    out.sort(key=lambda g: eng.key(g.lm))
    return out


def _as_basis(eng: _Engine, gb: GroebnerBasis) -> list:
    return [eng.make(_to_internal(g), g.degree()) for g in gb.generators]


def normal_form(p: MultiPoly, gb: GroebnerBasis, budget: Budget | None = None) -> MultiPoly:
    """Remainder of ``p`` on division by the Groebner basis ``gb``."""
    if not p or not gb.generators:
        return p
    eng = _Engine(p.table, gb.order, budget)
    rem, _ = eng.reduce(_to_internal(p), _as_basis(eng, gb))
    return _from_internal(rem, p.table)


def divide(p: MultiPoly, divisors: Sequence[MultiPoly], order: MonomialOrder = DEFAULT_ORDER):
    """Multivariate division: ``p = sum(q_i * divisors[i]) + r``; returns ``(quotients, r)``."""
    table = p.table
    key = order.keyfunc(table)
    guard = table.guard
    divs = []
    for g in divisors:
        t = _to_internal(g)
        lm = max(t, key=key)
        divs.append((lm, t[lm], t))
    quot = [dict() for _ in divisors]
    f = _to_internal(p)
    rem: dict = {}
    while f:
        m = max(f, key=key)
        c = f[m]
        for k, (lm, lc, t) in enumerate(divs):
            if _divides(lm, m, guard):
                s = m - lm
                q = c / lc
                quot[k][s] = quot[k].get(s, 0) + q
                for gm, gc in t.items():
                    nm = gm + s
                    v = f.get(nm, 0) - q * gc
                    if v:
                        f[nm] = v
                    else:
                        f.pop(nm, None)
                break
        else:
            rem[m] = c
            del f[m]
    return [_from_internal(q, table) for q in quot], _from_internal(rem, table)


def ideal_member(p: MultiPoly, gens: Sequence[MultiPoly], order: MonomialOrder = DEFAULT_ORDER,
                 budget: Budget | None = None) -> bool:
    return normal_form(p, buchberger(gens, order, budget), budget).is_zero()


def is_in_radical(p: MultiPoly, gens: Sequence[MultiPoly], order: MonomialOrder = DEFAULT_ORDER,
                  budget: Budget | None = None, aux: str = "w") -> bool:
    """``p`` lies in the radical of ``<gens>`` iff ``1`` is in ``<gens, 1 - aux*p>``."""
    table = p.table
    for g in list(gens) + [p]:
        if aux in g.variables():
            raise PolyError(f"auxiliary variable {aux!r} already occurs in the input")
    if order.priority[:1] != (aux,):
        order = MonomialOrder(order.kind, (aux,) + tuple(v for v in order.priority if v != aux))
    rab = MultiPoly.const(1, table) - MultiPoly.var(aux, table) * p
    gb = buchberger(list(gens) + [rab], order, budget, stop_on_unit=True)
    return gb.is_unit()


def intersect(ideal_a: Sequence[MultiPoly], ideal_b: Sequence[MultiPoly], aux: str = "w",
              budget: Budget | None = None) -> list:
    """Generators of ``<A> ∩ <B>`` by eliminating ``aux`` from ``<aux*A, (1-aux)*B>``."""
    polys = list(ideal_a) + list(ideal_b)
    if not polys:
        return []
    table = polys[0].table
    for g in polys:
        if aux in g.variables():
            raise PolyError(f"auxiliary variable {aux!r} already occurs in the input")
    w = MultiPoly.var(aux, table)
    one = MultiPoly.const(1, table)
    gens = [w * a for a in ideal_a] + [(one - w) * b for b in ideal_b]
    rest = tuple(v for v in DEFAULT_ORDER.priority if v != aux)
    order = MonomialOrder("elim", (aux,) + rest)
    gb = buchberger(gens, order, budget)
    out = [g for g in gb.generators if aux not in g.variables()]
    return buchberger(out, MonomialOrder("degrevlex", rest), budget).generators if out else []


def evaluate_ideal(gens: Sequence[MultiPoly], point) -> list:
    """Values of every generator at a point binding all of their variables."""
    out = []
    for g in gens:
        v = g.evaluate(point)
        if not v.is_constant():
            raise PolyError(f"unbound variables {v.variables()} when evaluating {g}")
        out.append(v.constant_value())
    return out


# ---------------------------------------------------------------------------
# real zero sets forced by squares


class RealZeroSetError(ValueError):
    """The generators left over are neither linear nor positive semidefinite quadrics."""


def _psd_linear_forms(q: MultiPoly):
    """For a homogeneous quadric ``q = sum d_k l_k^2`` with ``d_k > 0`` return the ``l_k``;
    ``None`` when ``q`` is not positive semidefinite."""
    names = q.variables()
    n = len(names)
    M = [[Fraction(0)] * n for _ in range(n)]
    for exps, c in q.terms():
        idx = [i for i, v in enumerate(names) for _ in range(exps[q.table.var_index(v)])]
        i, j = idx
        if i == j:
            M[i][i] += c
        else:
            M[i][j] += c / 2
            M[j][i] += c / 2
    forms = []
    for k in range(n):
        p = M[k][k]
        if p < 0:
            return None
        if p == 0:
            if any(M[k][j] for j in range(k + 1, n)):
                return None
            continue
        forms.append(sum((MultiPoly.var(names[j], q.table).scale(M[k][j] / p) for j in range(k, n)),
                         MultiPoly.zero(q.table)))
        for i in range(k + 1, n):
            f = M[i][k] / p
            for j in range(k + 1, n):
                M[i][j] -= f * M[k][j]
    return forms


def real_zero_set(gens: Sequence[MultiPoly], priority: Sequence[str] = PARAMETERS) -> dict:
    """Real zero set of ``gens`` when it is forced by linear generators and positive
    semidefinite quadrics.

    Returns a substitution ``{var: linear polynomial in the free variables}``;
    variables not in the result are free.  ``None`` means the set is empty.  Raises :class:`RealZeroSetError` if
    some generator does not reduce to zero this way.
    """
    pending = list(gens)
    sub: dict = {}
    while True:
        progress = False
        for g in pending:
            h = g.substitute(sub) if sub else g
            if h.is_zero():
                continue
            if h.is_constant():
                return None
            if h.degree() == 1:
                new = [h]
            elif h.degree() == 2 and h.homogeneous_component(2, h.variables()) == h:
                new = _psd_linear_forms(h)
                if new is None:
                    continue
            else:
                continue
            for lin in new:
                lin = lin.substitute(sub) if sub else lin
                if lin.is_zero():
                    continue
                if lin.is_constant():
                    return None
                v = next(v for v in list(priority) + lin.variables() if v in lin.variables())
                c = lin.coefficient_in((v,), (1,)).constant_value()
                expr = (MultiPoly.var(v, lin.table).scale(c) - lin).scale(1 / c)
                sub = {k: e.substitute({v: expr}) for k, e in sub.items()}
                sub[v] = expr
            progress = True
            break
        if not progress:
            break
    left = [g for g in pending if not (g.substitute(sub) if sub else g).is_zero()]
    if left:
        raise RealZeroSetError(f"cannot force {left[0]} to vanish over the reals")
    return sub
