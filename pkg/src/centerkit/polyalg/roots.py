"""Univariate real-root isolation over the rationals.

Polynomials here are dense coefficient lists ``[c0, c1, ..., cn]`` of
:class:`fractions.Fraction`, lowest degree first.  Roots are isolated on the
square-free factors of Yun's decomposition with Sturm sequences, so every
multiplicity is exact and every irrational root is carried as a polynomial
together with an isolating interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly, PolyError


def _trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _coerce_coeffs(p) -> list:
    if isinstance(p, MultiPoly):
        names = p.variables()
        if len(names) > 1:
            raise PolyError(f"{p} is not univariate")
        if not names:
            return _trim([p.constant_term()])
        return _trim(p.univariate_coeffs(names[0]))
    return _trim([Fraction(c) for c in p])


def evaluate(a: Sequence[Fraction], x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def derivative(a: Sequence[Fraction]) -> list:
    return [k * a[k] for k in range(1, len(a))]


def divmod_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple:
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / lead
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = _trim(r)
    return _trim(q), r


def monic(a: Sequence[Fraction]) -> list:
    a = _trim(a)
    return [c / a[-1] for c in a] if a else []


def gcd_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree_decomposition(a: Sequence[Fraction]) -> list:
    """Yun's algorithm: ``[(f_1, 1), (f_2, 2), ...]`` with monic square-free,
    pairwise coprime ``f_k`` whose product of powers equals ``a`` up to a
    constant.  Constant factors are dropped."""
    a = monic(a)
    if len(a) <= 1:
        return []
    da = derivative(a)
    g = gcd_poly(a, da)
    b = divmod_poly(a, g)[0]
    c = divmod_poly(da, g)[0]
    d = _sub(c, derivative(b))
    out = []
    k = 1
    while len(b) > 1:
        h = gcd_poly(b, d)
        if len(h) > 1:
            out.append((h, k))
        b = divmod_poly(b, h)[0]
        c = divmod_poly(d, h)[0]
        d = _sub(c, derivative(b))
        k += 1
    return out


def _sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def sturm_sequence(a: Sequence[Fraction]) -> list:
    seq = [_trim(a), derivative(_trim(a))]
    while len(seq[-1]) > 0:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq: list, x) -> int:
    n = 0
    last = 0
    for s in seq:
        v = evaluate(s, x)
        if v != 0:
            sgn = 1 if v > 0 else -1
            if last and sgn != last:
                n += 1
            last = sgn
    return n


def count_roots(seq: list, lo, hi) -> int:
    """Number of distinct roots in the half-open interval ``(lo, hi]``."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(a: Sequence[Fraction]) -> Fraction:
    """Cauchy bound: every root has absolute value below the result."""
    a = _trim(a)
    lead = abs(a[-1])
    return 1 + max((abs(c) / lead for c in a[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class AlgebraicNumber:
    """A real root of a square-free polynomial, pinned by an isolating
    half-open interval ``(lo, hi]`` whose right end is not a root."""

    def __init__(self, poly: Sequence[Fraction], interval: Interval):
        self.poly = monic(poly)
        self.interval = interval
        self._seq = None

    @property
    def sturm(self) -> list:
        if self._seq is None:
            self._seq = sturm_sequence(self.poly)
        return self._seq

    def refine(self, width: Fraction) -> Interval:
        lo, hi = self.interval.lo, self.interval.hi
        shi = evaluate(self.poly, hi) > 0
        while hi - lo > width:
            m = (lo + hi) / 2
            v = evaluate(self.poly, m)
            if v == 0:
                # exact rational root found while refining
                self.poly = [-m, Fraction(1)]
                self._seq = None
                eps = width / 4
                self.interval = Interval(m - eps, m + eps)
                return self.interval
            if (v > 0) == shi:
                hi = m
            else:
                lo = m
        self.interval = Interval(lo, hi)
        return self.interval

    def sign_of(self, g: Sequence[Fraction]) -> int:
        """Exact sign of ``g`` evaluated at this number."""
        g = _trim(g)
        if not g:
            return 0
        h = gcd_poly(self.poly, g)
        if len(h) > 1 and count_roots(sturm_sequence(h), self.interval.lo, self.interval.hi) > 0:
            return 0
        gs = sturm_sequence(g)
        while count_roots(gs, self.interval.lo, self.interval.hi) > 0 or evaluate(g, self.interval.lo) == 0:
            self.refine(self.interval.width / 4)
        v = evaluate(g, self.interval.mid)
        return 1 if v > 0 else -1

    def sign(self) -> int:
        return self.sign_of([Fraction(0), Fraction(1)])

    def compare(self, x: Fraction) -> int:
        """Sign of ``self - x``."""
        return self.sign_of([-Fraction(x), Fraction(1)])

    def __float__(self) -> float:
        self.refine(Fraction(1, 2 ** 60) * max(1, abs(self.interval.mid)))
        return float(self.interval.mid)

    def approx(self, bits: int = 60) -> Fraction:
        self.refine(Fraction(1, 2 ** bits))
        return self.interval.mid

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.poly}, {self.interval})"


def _isolate(seq: list, lo: Fraction, hi: Fraction, out: list) -> None:
    n = count_roots(seq, lo, hi)
    if n == 0:
        return
    if n == 1:
        out.append((lo, hi))
        return
    m = (lo + hi) / 2
    _isolate(seq, lo, m, out)
    _isolate(seq, m, hi, out)


def _exact_or_algebraic(f: list, lo: Fraction, hi: Fraction):
    """Turn an isolating half-open interval of square-free ``f`` into an exact
    rational when the root is rational, else an :class:`AlgebraicNumber`."""
    if evaluate(f, hi) == 0:
        return hi
    if len(f) == 2:
        return -f[0] / f[1]
    ints = MultiPoly.from_univariate(f, "x").primitive().univariate_coeffs("x")
    lead = int(ints[-1])
    num = AlgebraicNumber(f, Interval(lo, hi))
    target = Fraction(1, 4 * lead * lead)
    iv = num.refine(target)
    if len(num.poly) == 2:
        return -num.poly[0]
    cand = iv.mid.limit_denominator(lead)
    if iv.contains(cand) and evaluate(f, cand) == 0:
        return cand
    return num


def real_roots(p, range: Interval | None = None) -> list:
    """Real roots of a univariate polynomial with multiplicities.

    Returns ``[(root, multiplicity), ...]`` sorted increasingly, where each
    root is an exact :class:`Fraction` when rational and otherwise an
    :class:`AlgebraicNumber`.  ``range`` restricts to a closed interval.
    """
    a = _coerce_coeffs(p)
    if not a:
        raise PolyError("the zero polynomial has no isolated roots")
    found = []
    for f, mult in squarefree_decomposition(a):
        bound = root_bound(f)
        lo, hi = -bound, bound
        if range is not None:
            lo, hi = max(lo, range.lo), min(hi, range.hi)
            if lo > hi:
                continue
        seq = sturm_sequence(f)
        boxes = []
        start = lo
        if evaluate(f, lo) == 0:
            found.append((lo, mult))
        _isolate(seq, start, hi, boxes)
        for blo, bhi in boxes:
            found.append((_exact_or_algebraic(f, blo, bhi), mult))
    found.sort(key=lambda rm: _sort_key(rm[0]))
    return found


def _sort_key(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    return r.approx(80)
