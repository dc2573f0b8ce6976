"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are packed into a single Python integer: variable ``i`` of the
table owns bits ``[64*i, 64*i + 64)``.  Exponents must stay below ``2**63``;
the top bit of every field is a guard bit, so monomial multiplication is an
integer addition followed by one mask test.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

FIELD_BITS = 64
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = (1 << (FIELD_BITS - 1)) - 1

Number = Union[int, Fraction]


class PolyError(ValueError):
    """Raised for table mismatches, unknown variables and exponent overflow."""


class VariableTable:
    """Ordered, duplicate-free list of variable names.

    The order is also the variable priority used by the canonical
    graded-reverse-lexicographic term order (first name is largest).
    """

    __slots__ = ("names", "index", "guard")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolyError(f"duplicate variable names in {names}")
        if not names:
            raise PolyError("a variable table needs at least one variable")
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        guard = 0
        for i in range(len(names)):
            guard |= 1 << (FIELD_BITS * i + FIELD_BITS - 1)
        self.guard = guard

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VariableTable({list(self.names)!r})"

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != len(self.names):
            raise PolyError(
                f"exponent vector of length {len(exps)} for table of size {len(self.names)}"
            )
        m = 0
        for i, e in enumerate(exps):
            if e < 0:
                raise PolyError(f"negative exponent {e}")
            if e > MAX_EXPONENT:
                raise PolyError(f"exponent {e} overflows the 64-bit bound")
            m |= int(e) << (FIELD_BITS * i)
        return m

    def unpack(self, m: int) -> tuple:
        return tuple((m >> (FIELD_BITS * i)) & FIELD_MASK for i in range(len(self.names)))

    def exponent(self, m: int, var: int) -> int:
        return (m >> (FIELD_BITS * var)) & FIELD_MASK

    def unit(self, var: int) -> int:
        return 1 << (FIELD_BITS * var)

    def var_index(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise PolyError(f"unknown variable {name!r}") from None


CANONICAL = VariableTable(("x", "y", "a0", "a1", "a2", "a3", "a4", "a5", "w"))
PARAMETERS = ("a0", "a1", "a2", "a3", "a4", "a5")


def grevlex_key(exps: Sequence[int]) -> tuple:
    """Sort key: larger key means larger monomial in degrevlex."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a rational coefficient")


class MultiPoly:
    """Immutable sparse polynomial over a :class:`VariableTable`.

    ``_t`` maps packed monomials to nonzero :class:`Fraction` coefficients.
    Equality is equality of these maps, which is a canonical form.
    """

    __slots__ = ("table", "_t", "_hash")

    def __init__(self, table: VariableTable, terms: Mapping[int, Fraction] | None = None):
        self.table = table
        self._t = {m: c for m, c in terms.items() if c} if terms else {}
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def _raw(cls, table: VariableTable, terms: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p.table = table
        p._t = terms
        p._hash = None
        return p

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, Number], table: VariableTable = CANONICAL):
        acc: dict = {}
        for exps, c in terms.items():
            m = table.pack(exps)
            acc[m] = acc.get(m, 0) + _coerce(c)
        return cls(table, acc)

    @classmethod
    def var(cls, name: str, table: VariableTable = CANONICAL) -> "MultiPoly":
        return cls._raw(table, {table.unit(table.var_index(name)): Fraction(1)})

    @classmethod
    def const(cls, c: Number, table: VariableTable = CANONICAL) -> "MultiPoly":
        c = _coerce(c)
        return cls._raw(table, {0: c} if c else {})

    @classmethod
    def zero(cls, table: VariableTable = CANONICAL) -> "MultiPoly":
        return cls._raw(table, {})

    # -- inspection -------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self) -> int:
        return len(self._t)

    def items(self):
        """Iterate ``(packed monomial, coefficient)`` pairs in no particular order."""
        return self._t.items()

    def terms(self) -> list:
        """``(exponent tuple, coefficient)`` pairs, largest monomial first."""
        unpack = self.table.unpack
        out = [(unpack(m), c) for m, c in self._t.items()]
        out.sort(key=lambda t: grevlex_key(t[0]), reverse=True)
        return out

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._t.get(self.table.pack(exps), Fraction(0))

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError(f"{self} is not a constant")
        return self._t.get(0, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._t.get(0, Fraction(0))

    def variables(self) -> list:
        """Names of the variables that actually occur, in table order."""
        used = 0
        for m in self._t:
            used |= m
        return [
            n for i, n in enumerate(self.table.names)
            if (used >> (FIELD_BITS * i)) & FIELD_MASK
        ]

    def degree(self, vars: Iterable[str] | None = None) -> int:
        """Total degree in ``vars`` (all variables by default); -1 for zero."""
        if not self._t:
            return -1
        idx = (range(len(self.table)) if vars is None
               else [self.table.var_index(v) for v in vars])
        ex = self.table.exponent
        return max(sum(ex(m, i) for i in idx) for m in self._t)

    def degree_in(self, var: str) -> int:
        if not self._t:
            return -1
        i = self.table.var_index(var)
        ex = self.table.exponent
        return max(ex(m, i) for m in self._t)

    def min_degree(self, vars: Iterable[str]) -> int:
        """Lowest total degree in ``vars`` over all terms; -1 for zero."""
        if not self._t:
            return -1
        idx = [self.table.var_index(v) for v in vars]
        ex = self.table.exponent
        return min(sum(ex(m, i) for i in idx) for m in self._t)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.table == other.table and self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self._t.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def __str__(self) -> str:
        from .parse import to_string

        return to_string(self)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.table is not other.table and self.table != other.table:
            raise PolyError(f"table mismatch: {self.table} vs {other.table}")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other, self.table)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._t)
        for m, c in other._t.items():
            s = acc.get(m)
            if s is None:
                acc[m] = c
            else:
                s += c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
        return MultiPoly._raw(self.table, acc)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.table, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._t)
        for m, c in other._t.items():
            s = acc.get(m)
            if s is None:
                acc[m] = -c
            else:
                s -= c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
        return MultiPoly._raw(self.table, acc)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def scale(self, c: Number) -> "MultiPoly":
        c = _coerce(c)
        if not c:
            return MultiPoly._raw(self.table, {})
        return MultiPoly._raw(self.table, {m: v * c for m, v in self._t.items()})

    def mul_term(self, mono: int, c: Fraction) -> "MultiPoly":
        """Multiply by the single term ``c * mono`` (packed monomial)."""
        out = {m + mono: v * c for m, v in self._t.items()}
        self._overflow_check(out)
        return MultiPoly._raw(self.table, out)

    def _overflow_check(self, terms) -> None:
        g = self.table.guard
        for m in terms:
            if m & g:
                raise PolyError("exponent overflow beyond the 64-bit bound")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return MultiPoly._raw(self.table, {})
        acc: dict = {}
        get = acc.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                acc[m] = get(m, 0) + ca * cb
        out = {m: c for m, c in acc.items() if c}
        self._overflow_check(out)
        return MultiPoly._raw(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise PolyError(f"exponent must be a nonnegative integer, got {k!r}")
        result = MultiPoly.const(1, self.table)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / _coerce(c))
        return NotImplemented

    # -- calculus and composition ----------------------------------------

    def diff(self, var: str) -> "MultiPoly":
        i = self.table.var_index(var)
        shift = FIELD_BITS * i
        unit = 1 << shift
        out = {}
        for m, c in self._t.items():
            e = (m >> shift) & FIELD_MASK
            if e:
                out[m - unit] = c * e
        return MultiPoly._raw(self.table, out)

    def substitute(self, bindings: Mapping[str, "MultiPoly | Number"]) -> "MultiPoly":
        """Simultaneous substitution ``var -> image``; unbound variables pass through."""
        if not bindings:
            return self
        table = self.table
        bound = []
        for name, img in bindings.items():
            i = table.var_index(name)
            if isinstance(img, MultiPoly):
                self._check(img)
            else:
                img = MultiPoly.const(img, table)
            bound.append((i, img))
        keep_mask = 0
        for i in range(len(table)):
            if i not in {j for j, _ in bound}:
                keep_mask |= FIELD_MASK << (FIELD_BITS * i)
        powers: dict = {}

        def power(j, img, e):
            key = (j, e)
            p = powers.get(key)
            if p is None:
                p = img if e == 1 else power(j, img, e - 1) * img
                powers[key] = p
            return p

        groups: dict = {}
        for m, c in self._t.items():
            key = tuple(table.exponent(m, j) for j, _ in bound)
            groups.setdefault(key, {})[m & keep_mask] = c
        result = MultiPoly._raw(table, {})
        for key, rest in groups.items():
            factor = MultiPoly._raw(table, rest)
            for (j, img), e in zip(bound, key):
                if e:
                    factor = factor * power(j, img, e)
            result = result + factor
        return result

    def evaluate(self, point: Mapping[str, Number]) -> "MultiPoly":
        """Partial evaluation at rational values."""
        return self.substitute({k: _coerce(v) for k, v in point.items()})

    def homogeneous_component(self, k: int, vars: Sequence[str] = ("x", "y")) -> "MultiPoly":
        """Terms whose total degree in ``vars`` equals ``k``; other variables are coefficients."""
        idx = [self.table.var_index(v) for v in vars]
        ex = self.table.exponent
        return MultiPoly._raw(
            self.table,
            {m: c for m, c in self._t.items() if sum(ex(m, i) for i in idx) == k},
        )

    def coefficient_in(self, vars: Sequence[str], exps: Sequence[int]) -> "MultiPoly":
        """Coefficient (a polynomial in the remaining variables) of ``prod vars**exps``."""
        idx = [self.table.var_index(v) for v in vars]
        ex = self.table.exponent
        sub = sum(e << (FIELD_BITS * i) for i, e in zip(idx, exps))
        out = {}
        for m, c in self._t.items():
            if all(ex(m, i) == e for i, e in zip(idx, exps)):
                out[m - sub] = c
        return MultiPoly._raw(self.table, out)

    def collect(self, vars: Sequence[str]) -> dict:
        """Split into ``{exponents in vars: coefficient polynomial}``."""
        idx = [self.table.var_index(v) for v in vars]
        ex = self.table.exponent
        out: dict = {}
        for m, c in self._t.items():
            key = tuple(ex(m, i) for i in idx)
            sub = sum(e << (FIELD_BITS * i) for i, e in zip(idx, key))
            out.setdefault(key, {})[m - sub] = c
        return {k: MultiPoly._raw(self.table, v) for k, v in out.items()}

    def divide_by_monomial(self, exps: Mapping[str, int]) -> "MultiPoly":
        """Exact division by a monomial; raises if some term is not divisible."""
        mono = 0
        for name, e in exps.items():
            mono += e << (FIELD_BITS * self.table.var_index(name))
        g = self.table.guard
        out = {}
        for m, c in self._t.items():
            d = m - mono
            if d < 0 or d & g:
                raise PolyError(f"{self} is not divisible by the monomial {dict(exps)}")
            out[d] = c
        return MultiPoly._raw(self.table, out)

    def content_monomial_power(self, var: str) -> int:
        """Largest ``e`` such that ``var**e`` divides every term (0 for the zero polynomial)."""
        if not self._t:
            return 0
        i = self.table.var_index(var)
        return min(self.table.exponent(m, i) for m in self._t)

    def to_table(self, table: VariableTable) -> "MultiPoly":
        """Re-express over another table; every occurring variable must exist there."""
        if table == self.table:
            return self
        src = self.table
        mapping = []
        for i, n in enumerate(src.names):
            mapping.append(table.index.get(n))
        out: dict = {}
        for m, c in self._t.items():
            nm = 0
            for i, j in enumerate(mapping):
                e = src.exponent(m, i)
                if e:
                    if j is None:
                        raise PolyError(f"variable {src.names[i]!r} missing from {table}")
                    nm += e << (FIELD_BITS * j)
            out[nm] = out.get(nm, 0) + c
        return MultiPoly(table, out)

    def univariate_coeffs(self, var: str) -> list:
        """Coefficients ``[c0, c1, ...]`` of a polynomial in ``var`` alone."""
        i = self.table.var_index(var)
        others = 0
        for j in range(len(self.table)):
            if j != i:
                others |= FIELD_MASK << (FIELD_BITS * j)
        n = self.degree_in(var)
        coeffs = [Fraction(0)] * (n + 1 if n >= 0 else 0)
        for m, c in self._t.items():
            if m & others:
                raise PolyError(f"{self} is not univariate in {var}")
            coeffs[self.table.exponent(m, i)] = c
        return coeffs

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Number], var: str,
                        table: VariableTable = CANONICAL) -> "MultiPoly":
        i = table.var_index(var)
        return cls(table, {k << (FIELD_BITS * i): _coerce(c) for k, c in enumerate(coeffs) if c})

    def primitive(self) -> "MultiPoly":
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self._t:
            return self
        from math import gcd

        den = 1
        for c in self._t.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self._t.values():
            num = gcd(num, int(c * den))
        lead = self.terms()[0][1]
        s = den / Fraction(num) if lead > 0 else -den / Fraction(num)
        return self.scale(s)


def var(name: str, table: VariableTable = CANONICAL) -> MultiPoly:
    return MultiPoly.var(name, table)


def const(c: Number, table: VariableTable = CANONICAL) -> MultiPoly:
    return MultiPoly.const(c, table)


def arith(op: str, lhs: MultiPoly, rhs) -> MultiPoly:
    """Dispatch ``add``/``sub``/``mul``/``pow``/``scale`` by name."""
    if op == "add":
        return lhs + lhs._lift(rhs)
    if op == "sub":
        return lhs - lhs._lift(rhs)
    if op == "mul":
        return lhs * lhs._lift(rhs)
    if op == "pow":
        return lhs ** rhs
    if op == "scale":
        return lhs.scale(rhs)
    raise PolyError(f"unknown operation {op!r}")
