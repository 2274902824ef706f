"""Picard lattice of the degree-5 del Pezzo surface.

Divisor classes are written in the basis ([E1], ..., [E5]) where E1..E4 are
the exceptional divisors of blowing up four points of CP^2 and E5 is the
pullback of a line.  The intersection form is diag(-1, -1, -1, -1, +1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from . import _exact as ex

SIGNATURE = (-1, -1, -1, -1, 1)
INDICES = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class DivisorClass:
    coeffs: tuple

    def __post_init__(self):
        cs = ex.fvec(self.coeffs)
        if len(cs) != 5:
            raise ValueError("a divisor class has exactly 5 coordinates")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def basis(cls, i: int) -> "DivisorClass":
        return cls(tuple(int(k == i) for k in INDICES))

    @classmethod
    def zero(cls) -> "DivisorClass":
        return cls((0,) * 5)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(ex.add(self.coeffs, other.coeffs))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(ex.sub(self.coeffs, other.coeffs))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-c for c in self.coeffs))

    def __mul__(self, c) -> "DivisorClass":
        return DivisorClass(ex.scale(ex.frac(c), self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, c) -> "DivisorClass":
        return self * (1 / ex.frac(c))

    def __matmul__(self, other: "DivisorClass") -> Fraction:
        return pair_product(self, other)

    def form_vector(self) -> tuple:
        """Euclidean vector u with <u, v> == pair_product(self, v)."""
        return tuple(s * c for s, c in zip(SIGNATURE, self.coeffs))


@dataclass(frozen=True, order=True)
class CurveLabel:
    """Index {i, j} of an exceptional curve, stored with i < j."""

    i: int
    j: int

    def __post_init__(self):
        a, b = sorted((self.i, self.j))
        if a == b or a not in INDICES or b not in INDICES:
            raise ValueError(f"invalid curve label {{{self.i}, {self.j}}}")
        object.__setattr__(self, "i", a)
        object.__setattr__(self, "j", b)

    @classmethod
    def parse(cls, s: str) -> "CurveLabel":
        s = s.strip().upper().removeprefix("C")
        if len(s) != 2 or not s.isdigit():
            raise ValueError(f"cannot parse curve label {s!r}")
        return cls(int(s[0]), int(s[1]))

    @property
    def pair(self) -> frozenset:
        return frozenset((self.i, self.j))

    def permuted(self, perm: Sequence[int]) -> "CurveLabel":
        """Apply ``k -> perm[k - 1]`` to both indices."""
        return CurveLabel(perm[self.i - 1], perm[self.j - 1])

    def __str__(self) -> str:
        return f"C{self.i}{self.j}"


ALL_LABELS: tuple = tuple(CurveLabel(i, j) for i, j in itertools.combinations(INDICES, 2))


def pair_product(a: DivisorClass, b: DivisorClass) -> Fraction:
    return sum((s * x * y for s, x, y in zip(SIGNATURE, a.coeffs, b.coeffs)), Fraction(0))


def gram_matrix() -> tuple:
    E = [DivisorClass.basis(i) for i in INDICES]
    return tuple(tuple(pair_product(a, b) for b in E) for a in E)


def canonical_class() -> DivisorClass:
    return DivisorClass((1, 1, 1, 1, -3))


def curve_class(l: CurveLabel) -> DivisorClass:
    """Class of the exceptional curve with label {i, j}.

    C_i5 = E_i, and for i, j <= 4 the line class E5 - E_k - E_l with
    {k, l} = {1, 2, 3, 4} minus {i, j}.  This is the labeling under which two
    curves meet exactly when their labels are disjoint.
    """
    if l.j == 5:
        return DivisorClass.basis(l.i)
    k, m = sorted(set(INDICES[:4]) - l.pair)
    return DivisorClass.basis(5) - DivisorClass.basis(k) - DivisorClass.basis(m)


def label_of_class(v: Sequence) -> CurveLabel | None:
    """Inverse of :func:`curve_class` on the ten classes; None elsewhere."""
    d = DivisorClass(tuple(v))
    for l in ALL_LABELS:
        if curve_class(l) == d:
            return l
    return None


def curves_intersect(a: CurveLabel, b: CurveLabel) -> bool:
    """Whether two distinct exceptional curves meet: iff their index pairs are disjoint."""
    if a == b:
        raise ValueError("curves_intersect needs two distinct curves")
    return not (a.pair & b.pair)


def intersection_graph() -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(ALL_LABELS)
    g.add_edges_from((a, b) for a, b in itertools.combinations(ALL_LABELS, 2)
                     if curves_intersect(a, b))
    return g


def independent_sets(graph: nx.Graph | None = None, max_size: int | None = None) -> list[frozenset]:
    """All independent vertex sets (including the empty set) by backtracking.

    Sets are listed by size, then lexicographically.
    """
    g = intersection_graph() if graph is None else graph
    nodes = sorted(g.nodes)
    out: list[frozenset] = []

    def extend(current: list, start: int):
        out.append(frozenset(current))
        if max_size is not None and len(current) == max_size:
            return
        for k in range(start, len(nodes)):
            v = nodes[k]
            if all(not g.has_edge(v, u) for u in current):
                current.append(v)
                extend(current, k + 1)
                current.pop()

    extend([], 0)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def contracted_curves(d: DivisorClass) -> frozenset:
    """Labels of the curves pairing non-positively with ``d``."""
    return frozenset(l for l in ALL_LABELS if pair_product(d, curve_class(l)) <= 0)


def index_permutation_matrix(perm: Sequence[int]) -> tuple:
    """Rational 5x5 matrix M (acting on columns) with M C_l = C_{perm(l)} for all labels.

    ``perm`` lists the images of 1..5.  The matrix is solved from five
    independent curve classes and then checked on all ten.
    """
    if sorted(perm) != list(INDICES):
        raise ValueError(f"not a permutation of 1..5: {perm!r}")
    src = [curve_class(l).coeffs for l in ALL_LABELS]
    dst = [curve_class(l.permuted(perm)).coeffs for l in ALL_LABELS]
    # rows of M: M[r] . src_k = dst_k[r]
    basis_idx: list[int] = []
    for k, v in enumerate(src):
        if ex.rank([src[i] for i in basis_idx] + [v]) > len(basis_idx):
            basis_idx.append(k)
    a = [src[k] for k in basis_idx]
    m = tuple(ex.solve(a, [dst[k][r] for k in basis_idx]) for r in range(5))
    for v, w in zip(src, dst):
        if tuple(ex.dot(row, v) for row in m) != w:
            raise AssertionError("index permutation is not induced by a linear map")
    return m


def apply_matrix(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(ex.dot(row, v) for row in m)


def petersen_dot(graph: nx.Graph | None = None) -> str:
    """DOT text of the intersection graph with nodes ``Cij`` in lexicographic order."""
    g = intersection_graph() if graph is None else graph
    lines = ["graph petersen {"]
    lines += [f"  {l};" for l in sorted(g.nodes)]
    edges = sorted(tuple(sorted(e)) for e in g.edges)
    lines += [f"  {a} -- {b};" for a, b in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def classes(labels: Iterable[CurveLabel]) -> list[DivisorClass]:
    return [curve_class(l) for l in labels]
