"""Recursive-descent parser and canonical printer for polynomial expressions.

Grammar (EBNF)::

    expr   = term { ("+" | "-") term } ;
    term   = unary { ("*" | "/") unary } ;        (* "/" only by a nonzero constant *)
    unary  = ("+" | "-") unary | power ;
    power  = atom [ ("^" | "**") INTEGER ] ;
    atom   = INTEGER | IDENT | "(" expr ")" ;

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  Exponents
are nonnegative integer literals; ``x^(-1)`` and ``x^1.5`` are rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import CANONICAL, MAX_EXPONENT, MultiPoly, VariableTable

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()])|(\S))")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(4) is not None:
            raise ParseError(f"unexpected character {m.group(4)!r}", m.start(4), text)
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            toks.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    toks.append(("eof", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, table: VariableTable):
        self.text = text
        self.table = table
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "eof":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "eof":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            tok = self.take()
            q = self.unary()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.error("division only by a nonzero constant", tok)
                p = p.scale(1 / q.constant_value())
        return p

    def unary(self) -> MultiPoly:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek()[:2] in (("op", "^"), ("op", "**")):
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                self.error("exponent must be a nonnegative integer literal")
            self.take()
            if tok[1] > MAX_EXPONENT:
                self.error("exponent overflows the 64-bit bound", tok)
            nxt = self.peek()
            if nxt[:2] in (("op", "^"), ("op", "**")):
                self.error("chained exponents are ambiguous; use parentheses")
            return base ** tok[1]
        return base

    def atom(self) -> MultiPoly:
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return MultiPoly.const(val, self.table)
        if kind == "ident":
            if val not in self.table.index:
                self.error(f"unknown identifier {val!r}", tok)
            return MultiPoly.var(val, self.table)
        if kind == "op" and val == "(":
            p = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return p
        self.error("expected a number, identifier or '('", tok)


def parse(text: str, table: VariableTable = CANONICAL) -> MultiPoly:
    """Parse ``text`` into a canonical :class:`MultiPoly` over ``table``."""
    return _Parser(text, table).parse()


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def monomial_string(exps, names) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def to_string(p: MultiPoly) -> str:
    """Canonical text form: terms in degrevlex order, largest first."""
    terms = p.terms()
    if not terms:
        return "0"
    out = []
    for k, (exps, c) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        mono = monomial_string(exps, p.table.names)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
