"""Small exact linear-algebra helpers over Q and Z.

Vectors are plain tuples; rationals are :class:`fractions.Fraction`.
Nothing here ever touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vector = tuple


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted in exact code")
    return Fraction(x)


def fvec(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(frac(x) for x in xs)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g in (0, 1):
        return tuple(v)
    return tuple(x // g for x in v)


def integer_scaled(v: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    fs = fvec(v)
    m = 1
    for x in fs:
        m = lcm(m, x.denominator)
    return primitive([int(x * m) for x in fs])


def common_denominator(v: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Return ``(X, D)`` with ``v == X / D`` and ``D > 0``."""
    d = 1
    for x in v:
        d = lcm(d, x.denominator)
    return tuple(int(x * d) for x in v), d


def integer_point(v: Sequence) -> tuple[tuple[int, ...], int]:
    """Return ``(X, D)`` with integer ``X``, ``D > 0`` and ``v == X / D``; avoids Fraction arithmetic."""
    fs = fvec(v)
    d = lcm(*(x.denominator for x in fs)) if fs else 1
    return tuple(x.numerator * (d // x.denominator) for x in fs), d


def row_echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [list(fvec(r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : rows . x = 0} in Q^ncols."""
    red, pivots = row_echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of ``a x = b`` over Q, or None when inconsistent."""
    ncols = len(a[0])
    aug = [list(fvec(r)) + [frac(bi)] for r, bi in zip(a, b)]
    red, pivots = row_echelon(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return tuple(x)


def affine_rank(points: Sequence[Sequence]) -> int:
    """Affine dimension of a point set; -1 for the empty set."""
    if not points:
        return -1
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]]) if len(points) > 1 else 0


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant over Q by elimination."""
    a = [list(fvec(r)) for r in m]
    n = len(a)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result
