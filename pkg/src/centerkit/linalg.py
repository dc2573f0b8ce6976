"""Fraction-free (Bareiss) elimination for small exact matrices."""

from __future__ import annotations

from fractions import Fraction
from math import lcm


class SingularMatrixError(ArithmeticError):
    pass


def _integer_rows(rows):
    out = []
    for row in rows:
        d = 1
        for v in row:
            d = lcm(d, Fraction(v).denominator)
        out.append([int(Fraction(v) * d) for v in row])
    return out


def bareiss_inverse(matrix) -> list:
    """Exact inverse of a square rational matrix.

    The matrix is augmented with the identity and reduced with Bareiss'
    one-step fraction-free elimination, so every intermediate entry is an
    integer; the only divisions are by the final determinant.
    """
    n = len(matrix)
    scales = []
    for row in matrix:
        d = 1
        for v in row:
            d = lcm(d, Fraction(v).denominator)
        scales.append(d)
    a = _integer_rows(matrix)
    for i in range(n):
        a[i] = a[i] + [scales[i] if j == i else 0 for j in range(n)]
    width = 2 * n
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        akk = a[k][k]
        rowk = a[k]
        for i in range(n):
            if i == k:
                continue
            rowi = a[i]
            aik = rowi[k]
            a[i] = [(akk * rowi[j] - aik * rowk[j]) // prev for j in range(width)]
        prev = akk
    return [[Fraction(a[i][n + j], a[i][i]) for j in range(n)] for i in range(n)]


def determinant(matrix) -> Fraction:
    """Exact determinant via Bareiss."""
    n = len(matrix)
    scale = Fraction(1)
    rows = []
    for row in matrix:
        d = 1
        for v in row:
            d = lcm(d, Fraction(v).denominator)
        scale /= d
        rows.append([int(Fraction(v) * d) for v in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if rows[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[k][k] * rows[i][j] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return sign * rows[n - 1][n - 1] * scale if n else Fraction(1)
