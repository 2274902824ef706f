"""Integer linear algebra for homology.

Smith normal form with unimodular witnesses, finitely generated abelian
groups in invariant-factor form, homology of chain complexes, Kunneth
products, and the two exact-sequence patterns the orbit-space computation
needs.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Sequence

from . import _exact as ex


class ChainComplexError(ValueError):
    pass


class UnsupportedSequenceError(ValueError):
    """An exact-sequence segment that does not determine the unknown group."""


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple = ()

    def __post_init__(self):
        for r in self.entries:
            for x in r:
                if isinstance(x, float):
                    raise TypeError("IntegerMatrix entries must be integers")
        ent = tuple(tuple(int(x) for x in r) for r in self.entries)
        if not ent and self.rows:
            ent = tuple(() for _ in range(self.rows))
        if len(ent) != self.rows or any(len(r) != self.cols for r in ent):
            raise ValueError(f"entries do not match shape {self.rows}x{self.cols}")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols is required for a matrix without rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(tuple(r) for r in rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> "IntegerMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        return cls(rows, cols, tuple(
            tuple(diag[i] if i == j and i < len(diag) else 0 for j in range(cols))
            for i in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    @property
    def T(self) -> "IntegerMatrix":
        return IntegerMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                             tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntegerMatrix(self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def rank(self) -> int:
        return ex.rank(self.entries) if self.rows and self.cols else 0

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if p is None:
                    return 0
                a[k], a[p] = a[p], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, data, cols: int | None = None) -> "IntegerMatrix":
        return cls.from_rows([[int(x) for x in r] for r in data], cols)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` in Smith form."""

    U: IntegerMatrix
    S: IntegerMatrix
    V: IntegerMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        n = min(self.S.shape)
        return tuple(d for d in (self.S[i, i] for i in range(n)) if d != 0)


def snf(a: IntegerMatrix) -> SmithDecomposition:
    """Smith normal form by least-absolute-value pivoting.

    Ties between equal pivots are broken by row-major position.
    """
    m, n = a.shape
    S = [list(r) for r in a.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        S[i], S[k] = S[k], S[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for M in (S, V):
            for r in M:
                r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for M in (S, V):
            for r in M:
                r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = S[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        p = S[t][t]
        for i in range(t + 1, m):
            if S[i][t]:
                add_row(i, t, -(S[i][t] // p))
        for j in range(t + 1, n):
            if S[t][j]:
                add_col(j, t, -(S[t][j] // p))
        if any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, n)):
            continue  # smaller remainders left; pick a new pivot
        bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p), None)
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    return SmithDecomposition(
        IntegerMatrix.from_rows(U, m), IntegerMatrix.from_rows(S, n), IntegerMatrix.from_rows(V, n))


def invariant_factors(a: IntegerMatrix) -> tuple[int, ...]:
    return snf(a).invariant_factors


@dataclass(frozen=True)
class FGAbelianGroup:
    """Z^rank + Z/t1 + ... + Z/tk with 1 < t1 | t2 | ... | tk."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        tor = tuple(int(t) for t in self.torsion)
        if self.rank < 0:
            raise ValueError("negative rank")
        if any(t <= 1 for t in tor):
            raise ValueError(f"torsion coefficients must exceed 1: {tor}")
        if any(b % a for a, b in zip(tor, tor[1:])):
            raise ValueError(f"torsion coefficients must form a divisibility chain: {tor}")
        object.__setattr__(self, "torsion", tor)

    @classmethod
    def free(cls, rank: int) -> "FGAbelianGroup":
        return cls(rank, ())

    @classmethod
    def zero(cls) -> "FGAbelianGroup":
        return cls(0, ())

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "FGAbelianGroup":
        """Normalize a direct sum of cyclic groups; order 0 means Z, 1 the trivial group."""
        orders = [abs(int(o)) for o in orders]
        if not orders:
            return cls.zero()
        factors = invariant_factors(IntegerMatrix.diagonal(orders))
        rank = len(orders) - len(factors)
        return cls(rank, tuple(d for d in factors if d > 1))

    def orders(self) -> tuple[int, ...]:
        return (0,) * self.rank + self.torsion

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __add__(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        return FGAbelianGroup.from_orders(self.orders() + other.orders())

    def tensor(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        parts = [0] * (self.rank * other.rank)
        parts += list(self.torsion) * other.rank + list(other.torsion) * self.rank
        parts += [gcd(a, b) for a in self.torsion for b in other.torsion]
        return FGAbelianGroup.from_orders(parts)

    def tor(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        return FGAbelianGroup.from_orders([gcd(a, b) for a in self.torsion for b in other.torsion])

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts)

    @classmethod
    def parse(cls, s: str) -> "FGAbelianGroup":
        s = s.strip()
        if s == "0":
            return cls.zero()
        orders: list[int] = []
        for part in s.split("+"):
            part = part.strip()
            if part == "Z":
                orders.append(0)
            elif part.startswith("Z^"):
                orders += [0] * int(part[2:])
            elif part.startswith("Z/"):
                orders.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse group {s!r}")
        return cls.from_orders(orders)


Z = FGAbelianGroup.free(1)
ZERO = FGAbelianGroup.zero()


def cokernel(a: IntegerMatrix) -> FGAbelianGroup:
    """Z^rows modulo the span of the columns of ``a``."""
    factors = invariant_factors(a) if a.rows and a.cols else ()
    return FGAbelianGroup(a.rows - len(factors), tuple(d for d in factors if d > 1))


def kernel_rank(a: IntegerMatrix) -> int:
    return a.cols - a.rank()


def homology_at(d_in: IntegerMatrix, d_out: IntegerMatrix) -> FGAbelianGroup:
    """ker(d_out) / im(d_in) for consecutive differentials.

    ``d_in`` maps into the chain group (its rows index that group) and
    ``d_out`` maps out of it (its columns index it).
    """
    if d_in.rows != d_out.cols:
        raise ChainComplexError(
            f"differentials do not compose: {d_out.shape} after {d_in.shape}")
    prod = d_out @ d_in
    for i, row in enumerate(prod.entries):
        for j, x in enumerate(row):
            if x:
                raise ChainComplexError(f"d_out @ d_in is nonzero: entry ({i}, {j}) = {x}")
    n = d_in.rows
    # im(d_in) is a full-rank sublattice of the saturated lattice ker(d_out),
    # so the torsion comes from d_in alone
    factors = invariant_factors(d_in) if d_in.rows and d_in.cols else ()
    rank = n - d_out.rank() - len(factors)
    return FGAbelianGroup(rank, tuple(d for d in factors if d > 1))


@dataclass(frozen=True)
class HomologyTable:
    """Graded abelian group; missing degrees are zero."""

    groups: tuple = ()

    def __init__(self, groups: Mapping[int, FGAbelianGroup] | Iterable = ()):
        items = dict(groups.items() if isinstance(groups, Mapping) else groups)
        if any(int(k) < 0 for k in items):
            raise ValueError("negative homological degree")
        norm = tuple(sorted((int(k), g) for k, g in items.items() if not g.is_zero))
        object.__setattr__(self, "groups", norm)

    def __getitem__(self, i: int) -> FGAbelianGroup:
        return dict(self.groups).get(i, ZERO)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.groups)

    @property
    def top(self) -> int:
        return max(self.degrees, default=-1)

    def shifted(self, k: int) -> "HomologyTable":
        return HomologyTable({i + k: g for i, g in self.groups})

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * g.rank for i, g in self.groups)

    def to_json(self) -> dict[str, str]:
        return {str(i): str(g) for i, g in self.groups}

    @classmethod
    def from_json(cls, d: Mapping[str, str]) -> "HomologyTable":
        return cls({int(k): FGAbelianGroup.parse(v) for k, v in d.items()})

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join(f"H{i}={g}" for i, g in self.groups)


def kunneth(a: HomologyTable, b: HomologyTable) -> HomologyTable:
    """Homology of a product (or of a product of pairs) from the factors' tables."""
    out: dict[int, FGAbelianGroup] = {}
    for i, g in a.groups:
        for j, h in b.groups:
            out[i + j] = out.get(i + j, ZERO) + g.tensor(h)
            t = g.tor(h)
            if not t.is_zero:
                out[i + j + 1] = out.get(i + j + 1, ZERO) + t
    return HomologyTable(out)


def chain_complex_homology(boundaries: Mapping[int, IntegerMatrix],
                           ranks: Mapping[int, int]) -> HomologyTable:
    """Homology of ``... -> C_k --d_k--> C_{k-1} -> ...``.

    ``boundaries[k]`` is the matrix of d_k (rows index C_{k-1}); missing
    differentials are zero maps.
    """
    out = {}
    for k, n in ranks.items():
        d_out = boundaries.get(k, IntegerMatrix.zeros(ranks.get(k - 1, 0), n))
        d_in = boundaries.get(k + 1, IntegerMatrix.zeros(n, ranks.get(k + 1, 0)))
        out[k] = homology_at(d_in, d_out)
    return HomologyTable(out)


def simplicial_chain_complex(simplices: Iterable[Sequence]):
    """Oriented simplicial chain complex generated by the given simplices.

    Returns ``(faces_by_dim, boundaries)``; faces are sorted vertex tuples.
    """
    faces: dict[int, set] = {}
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            faces.setdefault(k - 1, set()).update(itertools.combinations(s, k))
    ordered = {k: sorted(v) for k, v in faces.items()}
    index = {k: {f: i for i, f in enumerate(v)} for k, v in ordered.items()}
    boundaries = {}
    for k in ordered:
        if k == 0:
            continue
        rows = [[0] * len(ordered[k]) for _ in ordered[k - 1]]
        for j, f in enumerate(ordered[k]):
            for t in range(len(f)):
                rows[index[k - 1][f[:t] + f[t + 1:]]][j] += (-1) ** t
        boundaries[k] = IntegerMatrix.from_rows(rows, len(ordered[k]))
    return ordered, boundaries


def simplicial_homology(simplices: Iterable[Sequence]) -> HomologyTable:
    ordered, boundaries = simplicial_chain_complex(simplices)
    return chain_complex_homology(boundaries, {k: len(v) for k, v in ordered.items()})


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism between free groups given by an integer matrix.

    Columns are the images of a basis of ``domain``, or, with
    ``on_generators=True``, of a generating set of it (possibly redundant).
    """

    domain: FGAbelianGroup
    codomain: FGAbelianGroup
    matrix: IntegerMatrix
    on_generators: bool = False

    def __post_init__(self):
        if self.matrix.rows != self.codomain.rank:
            raise ValueError("matrix rows must match the codomain rank")
        if not self.on_generators and self.matrix.cols != self.domain.rank:
            raise ValueError("matrix columns must match the domain rank")
        if self.on_generators and self.matrix.rank() > self.domain.rank:
            raise ValueError("image rank exceeds the rank of the domain")


def solve_four_term(f: GroupHom) -> tuple[FGAbelianGroup, FGAbelianGroup]:
    """Solve ``0 -> A -> G1 --f--> G2 -> B -> 0``: return ``(ker f, coker f)``."""
    if not (f.domain.is_free and f.codomain.is_free):
        raise UnsupportedSequenceError("four-term solving needs free middle groups")
    ker = FGAbelianGroup.free(f.domain.rank - f.matrix.rank())
    return ker, cokernel(f.matrix)


def solve_flanked(left: FGAbelianGroup = ZERO, right: FGAbelianGroup = ZERO) -> FGAbelianGroup:
    """The group H in an exact segment ``0 -> left -> H -> right -> 0``.

    Only determined when one side vanishes; an extension of two nonzero
    groups is refused rather than guessed.
    """
    if left.is_zero:
        return right
    if right.is_zero:
        return left
    raise UnsupportedSequenceError(
        f"0 -> {left} -> H -> {right} -> 0 does not determine H without more data")


def dumps_matrix(a: IntegerMatrix) -> str:
    return json.dumps(a.to_json())
