"""Exact rational polytopes: H- and V-representations and conversions.

Both conversions run the double description method on integer cones.
H -> V homogenizes ``<a, x> >= b`` to ``<(-b, a), (t, x)> >= 0`` and reads
vertices off the extreme rays with ``t > 0``.  V -> H runs the same routine
on the dual cone ``{(c, a) : c + <a, v> >= 0 for all vertices v}``, whose
lineality space is the set of affine equations of the hull and whose
extreme rays are the facets.

All coordinates are :class:`fractions.Fraction`.  Sized for dimension <= 6
and a few hundred vertices.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial, lcm
from typing import Iterable, NamedTuple, Sequence

from . import _exact as ex

Point = tuple  # tuple[Fraction, ...]


class PolytopeError(ValueError):
    pass


class UnboundedError(PolytopeError):
    """Raised when an H-description does not describe a bounded set."""


class EmptyPolytopeError(PolytopeError):
    pass


@dataclass(frozen=True)
class AffineHalfspace:
    """The closed halfspace ``{v : <v, normal> >= offset}``.

    The same type doubles as an affine equation ``<v, normal> == offset``
    wherever a list of equations is expected.
    """

    normal: tuple
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", ex.fvec(self.normal))
        object.__setattr__(self, "offset", ex.frac(self.offset))
        if not any(self.normal):
            raise PolytopeError("halfspace normal must be nonzero")

    @cached_property
    def integer_row(self) -> tuple[tuple[int, ...], int, int]:
        """``(a, c, m)``: the constraint scaled by ``m > 0`` to integers ``<a, x> >= c``."""
        m = lcm(*(x.denominator for x in self.normal + (self.offset,)))
        return tuple(int(x * m) for x in self.normal), int(self.offset * m), m

    def scaled_value(self, X: Sequence[int], D: int) -> int:
        """Integer with the sign of ``value(X / D)``; equals ``m * D * value``."""
        a, c, _ = self.integer_row
        return sum(x * y for x, y in zip(a, X)) - c * D

    def value(self, v: Sequence) -> Fraction:
        """Signed slack ``<v, normal> - offset``."""
        X, D = ex.integer_point(v)
        return Fraction(self.scaled_value(X, D), self.integer_row[2] * D)

    def contains(self, v: Sequence) -> bool:
        return self.scaled_value(*ex.integer_point(v)) >= 0

    def on_boundary(self, v: Sequence) -> bool:
        return self.scaled_value(*ex.integer_point(v)) == 0

    def opposite(self) -> "AffineHalfspace":
        return AffineHalfspace(tuple(-x for x in self.normal), -self.offset)

    def normalized(self) -> "AffineHalfspace":
        """Same halfspace with a primitive integer normal."""
        row = ex.integer_scaled(self.normal + (self.offset,))
        return AffineHalfspace(row[:-1], row[-1])

    def hyperplane_key(self) -> tuple[int, ...]:
        """Canonical key of the bounding hyperplane (sign of first nonzero entry > 0)."""
        row = ex.integer_scaled(self.normal + (self.offset,))
        first = next(x for x in row if x)
        return row if first > 0 else tuple(-x for x in row)

    @property
    def dim(self) -> int:
        return len(self.normal)


@dataclass(frozen=True)
class HPolytope:
    ambient_dim: int
    halfspaces: tuple = ()
    equations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        object.__setattr__(self, "equations", tuple(self.equations))
        for h in self.halfspaces + self.equations:
            if h.dim != self.ambient_dim:
                raise PolytopeError(
                    f"constraint of dimension {h.dim} in ambient dimension {self.ambient_dim}")

    def contains(self, v: Sequence) -> bool:
        X, D = ex.integer_point(v)
        return (all(e.scaled_value(X, D) == 0 for e in self.equations)
                and all(h.scaled_value(X, D) >= 0 for h in self.halfspaces))


class Facet(NamedTuple):
    halfspace: AffineHalfspace  # inward normal
    vertices: frozenset  # indices into VPolytope.vertices


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a minimal vertex list (sorted lexicographically).

    Use :meth:`hull` to build one from arbitrary points; the plain
    constructor trusts that ``vertices`` is already minimal.
    """

    vertices: tuple
    ambient_dim: int

    def __post_init__(self):
        vs = tuple(sorted(set(ex.fvec(v) for v in self.vertices)))
        for v in vs:
            if len(v) != self.ambient_dim:
                raise PolytopeError("vertex of wrong dimension")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def hull(cls, points: Iterable[Sequence], ambient_dim: int | None = None) -> "VPolytope":
        pts = sorted(set(ex.fvec(p) for p in points))
        if ambient_dim is None:
            if not pts:
                raise PolytopeError("cannot infer the dimension of an empty point set")
            ambient_dim = len(pts[0])
        if len(pts) <= 2:
            return cls(tuple(pts), ambient_dim)
        eqs, raw = _dual_description(pts, ambient_dim)
        keep = []
        for p in pts:
            tight = [h.normal for h in raw if h.on_boundary(p)]
            if ex.rank(tight + [e.normal for e in eqs]) == ambient_dim:
                keep.append(p)
        return cls(tuple(keep), ambient_dim)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def _description(self):
        return _dual_description(self.vertices, self.ambient_dim)

    @cached_property
    def hull_equations(self) -> tuple:
        """Canonical affine equations of the affine hull."""
        return self._description[0]

    @cached_property
    def facets(self) -> tuple:
        out = []
        for h in self._description[1]:
            inc = frozenset(i for i, v in enumerate(self.vertices) if h.on_boundary(v))
            out.append(Facet(h, inc))
        out.sort(key=lambda f: (sorted(f.vertices), f.halfspace.normal))
        return tuple(out)

    def contains(self, v: Sequence) -> bool:
        if self.is_empty:
            return False
        X, D = ex.integer_point(v)
        return (all(e.scaled_value(X, D) == 0 for e in self.hull_equations)
                and all(f.halfspace.scaled_value(X, D) >= 0 for f in self.facets))


# -- double description -----------------------------------------------------

def _double_description(ineqs: Sequence[Sequence[int]], eqs: Sequence[Sequence[int]], n: int):
    """Generators of the cone ``{y in Q^n : A y >= 0, E y = 0}``.

    Returns ``(lineality, rays)``: integer basis vectors of the lineality
    space and primitive integer extreme rays (modulo lineality).
    """
    if eqs:
        lin = [ex.integer_scaled(v) for v in ex.nullspace(eqs, n)]
    else:
        lin = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: list[tuple[tuple[int, ...], int]] = []  # (ray, bitmask of tight rows)

    for k, a in enumerate(ineqs):
        bit = 1 << k
        piv = next((i for i, l in enumerate(lin) if ex.dot(a, l) != 0), None)
        if piv is not None:
            l = lin.pop(piv)
            s = ex.dot(a, l)
            if s < 0:
                l, s = tuple(-x for x in l), -s
            lin = [ex.primitive([s * x - ex.dot(a, m) * y for x, y in zip(m, l)]) for m in lin]
            rays = [(ex.primitive([s * x - ex.dot(a, r) * y for x, y in zip(r, l)]), z | bit)
                    for r, z in rays]
            rays.append((l, bit - 1))
            continue

        vals = [ex.dot(a, r) for r, _ in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new = [rays[i] for i in pos]
        new += [(r, z | bit) for (r, z), v in zip(rays, vals) if v == 0]
        masks = [z for _, z in rays]
        for i in pos:
            ri, zi = rays[i]
            for j in neg:
                rj, zj = rays[j]
                common = zi & zj
                if any(t != i and t != j and (m & common) == common for t, m in enumerate(masks)):
                    continue
                vi, vj = vals[i], -vals[j]
                new.append((ex.primitive([vi * y + vj * x for x, y in zip(ri, rj)]), common | bit))
        rays = new
    return lin, [r for r, _ in rays]


def _homogenized_row(h: AffineHalfspace) -> tuple[int, ...]:
    row = ex.integer_scaled((-h.offset,) + h.normal)
    return row


def vertices(p: HPolytope) -> VPolytope:
    """Minimal vertex set of a bounded H-polytope (empty list when infeasible)."""
    n = p.ambient_dim
    ineqs = [(1,) + (0,) * n] + [_homogenized_row(h) for h in p.halfspaces]
    eqs = [_homogenized_row(e) for e in p.equations]
    lin, rays = _double_description(ineqs, eqs, n + 1)
    verts = [tuple(Fraction(x, r[0]) for x in r[1:]) for r in rays if r[0] > 0]
    if not verts:
        return VPolytope((), n)
    if lin or any(r[0] == 0 for r in rays):
        raise UnboundedError("the inequality system describes an unbounded polyhedron")
    return VPolytope(tuple(verts), n)


def _dual_description(points: Sequence[Point], n: int):
    """Canonical hull equations and facet halfspaces of conv(points)."""
    if not points:
        return (), ()
    rows = []
    for v in points:
        num, den = ex.common_denominator(v)
        rows.append((den,) + num)
    lin, rays = _double_description(rows, [], n + 1)

    # hull equations: rows (a, c) with <a, x> + c = 0, in reduced echelon form
    eq_rows = [l[1:] + l[:1] for l in lin]
    red, _ = ex.row_echelon(eq_rows)
    equations = tuple(
        AffineHalfspace(r[:-1], -r[-1])
        for r in (ex.integer_scaled(row) for row in red))

    lin_a = [l[1:] for l in lin]
    lin_c = [l[0] for l in lin]
    gram = [[ex.dot(x, y) for y in lin_a] for x in lin_a]
    halfspaces = []
    for r in rays:
        c, a = Fraction(r[0]), ex.fvec(r[1:])
        if lin_a:
            lam = ex.solve(gram, [ex.dot(a, x) for x in lin_a])
            a = tuple(ai - sum(l * x[k] for l, x in zip(lam, lin_a)) for k, ai in enumerate(a))
            c = c - sum(l * ci for l, ci in zip(lam, lin_c))
        if not any(a):
            continue
        row = ex.integer_scaled(a + (c,))
        halfspaces.append(AffineHalfspace(row[:-1], -row[-1]))
    halfspaces = list({h.normal + (h.offset,): h for h in halfspaces}.values())
    return equations, tuple(halfspaces)


# -- operations on V-polytopes ------------------------------------------------

def facets(p: VPolytope) -> list[Facet]:
    """Facets with inward supporting halfspace and incident vertex indices."""
    if p.is_empty or dim(p) < 1:
        return []
    return list(p.facets)


def dim(p: VPolytope) -> int:
    return ex.affine_rank(p.vertices)


def to_hpolytope(p: VPolytope) -> HPolytope:
    if p.is_empty:
        raise EmptyPolytopeError("empty polytope has no canonical H-description")
    return HPolytope(p.ambient_dim, tuple(f.halfspace for f in p.facets), p.hull_equations)


def interior_point(p: VPolytope) -> Point:
    """Vertex barycenter; lies in the relative interior."""
    if p.is_empty:
        raise EmptyPolytopeError("empty polytope has no interior point")
    m = len(p.vertices)
    return tuple(sum(col) / m for col in zip(*p.vertices))


def clip(p: VPolytope, hs: Iterable[AffineHalfspace]) -> VPolytope:
    """Vertex representation of ``p`` intersected with the given halfspaces."""
    hs = tuple(hs)
    if p.is_empty:
        return p
    if not hs:
        return p
    if len(p.vertices) == 1:
        v = p.vertices[0]
        return p if all(h.contains(v) for h in hs) else VPolytope((), p.ambient_dim)
    h = to_hpolytope(p)
    return vertices(HPolytope(p.ambient_dim, h.halfspaces + hs, h.equations))


def face_lattice(p: VPolytope) -> list[frozenset]:
    """All nonempty faces as vertex-index sets (including ``p`` itself)."""
    if p.is_empty:
        return []
    facet_sets = {f.vertices for f in facets(p)}
    faces = {frozenset(range(len(p.vertices)))} | facet_sets
    frontier = set(facet_sets)
    # every proper face is an intersection of facets
    while frontier:
        nxt = {a & b for a in frontier for b in facet_sets} - faces - {frozenset()}
        faces |= nxt
        frontier = nxt
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def f_vector(p: VPolytope) -> tuple[int, ...]:
    """Number of faces in each dimension 0 .. dim(p) - 1."""
    d = dim(p)
    counts = [0] * max(d, 0)
    for face in face_lattice(p):
        k = ex.affine_rank([p.vertices[i] for i in face])
        if k < d:
            counts[k] += 1
    return tuple(counts)


def triangulate(p: VPolytope, face: frozenset | None = None) -> list[tuple[int, ...]]:
    """Pulling triangulation with respect to vertex index order.

    Returns increasing index tuples.  The triangulation of every face is the
    restriction of the whole one, so triangulating the facets of a polytope
    separately yields a simplicial complex structure on its boundary.
    """
    memo: dict = {}

    def rec(idx: frozenset) -> list[tuple[int, ...]]:
        if idx in memo:
            return memo[idx]
        if len(idx) == 1:
            memo[idx] = [tuple(idx)]
            return memo[idx]
        order = sorted(idx)
        sub = VPolytope(tuple(p.vertices[i] for i in order), p.ambient_dim)
        # VPolytope sorts its vertices, and p.vertices is sorted too, so order is kept
        apex = order[0]
        out = []
        for f in facets(sub):
            glob = frozenset(order[i] for i in f.vertices)
            if apex in glob:
                continue
            out.extend((apex,) + s for s in rec(glob))
        memo[idx] = out
        return out

    if p.is_empty:
        return []
    return rec(frozenset(range(len(p.vertices))) if face is None else frozenset(face))


def _projection_coords(points: Sequence[Point], d: int) -> tuple[int, ...]:
    p0 = points[0]
    diffs = [ex.sub(q, p0) for q in points[1:]]
    for coords in itertools.combinations(range(len(p0)), d):
        if ex.rank([[v[c] for c in coords] for v in diffs]) == d:
            return coords
    raise PolytopeError("no injective coordinate projection found")


def volume(p: VPolytope, coords: Sequence[int] | None = None) -> Fraction:
    """Exact d-volume of the projection onto a coordinate subspace.

    With ``coords=None`` the lexicographically first coordinate set on which
    the affine hull projects injectively is used; the choice depends only on
    the hull, so volumes of polytopes sharing a hull are comparable.
    """
    d = dim(p)
    if d <= 0:
        return Fraction(int(d == 0))
    if coords is None:
        coords = _projection_coords(p.vertices, d)
    total = Fraction(0)
    for simplex in triangulate(p):
        v0 = p.vertices[simplex[0]]
        rows = [[p.vertices[i][c] - v0[c] for c in coords] for i in simplex[1:]]
        total += abs(ex.det(rows))
    return total / factorial(d)


# -- named polytopes --------------------------------------------------------

def cross_section_P() -> VPolytope:
    """Convex hull of the ten exceptional curve classes (E-basis coordinates)."""
    from .lattice import ALL_LABELS, curve_class
    return VPolytope.hull([curve_class(l).coeffs for l in ALL_LABELS], 5)


def standard_hypersimplex(k: int = 2, n: int = 5) -> VPolytope:
    """Delta(k, n) = {x in R^n : sum x = k, 0 <= x <= 1} by its 0/1 vertices."""
    verts = [tuple(int(i in c) for i in range(n)) for c in itertools.combinations(range(n), k)]
    return VPolytope(tuple(verts), n)


def standard_hypersimplex_h(k: int = 2, n: int = 5) -> HPolytope:
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    hs = [AffineHalfspace(u, 0) for u in units]
    hs += [AffineHalfspace(tuple(-x for x in u), -1) for u in units]
    return HPolytope(n, tuple(hs), (AffineHalfspace((1,) * n, k),))


# -- JSON -------------------------------------------------------------------

def rational_to_json(x: Fraction) -> str:
    return str(x)


def rational_from_json(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise PolytopeError(f"not an exact rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as e:
            raise PolytopeError(f"not an exact rational: {x!r}") from e
    raise PolytopeError(f"not an exact rational: {x!r}")


def _row_to_json(h: AffineHalfspace) -> list[str]:
    return [rational_to_json(x) for x in h.normal] + [rational_to_json(h.offset)]


def _row_from_json(row, n: int) -> AffineHalfspace:
    if not isinstance(row, list) or len(row) != n + 1:
        raise PolytopeError(f"constraint row must have {n + 1} entries: {row!r}")
    vals = [rational_from_json(x) for x in row]
    return AffineHalfspace(tuple(vals[:-1]), vals[-1])


def hpolytope_to_json(p: HPolytope) -> dict:
    return {
        "ambient_dim": p.ambient_dim,
        "inequalities": [_row_to_json(h) for h in p.halfspaces],
        "equations": [_row_to_json(e) for e in p.equations],
    }


def hpolytope_from_json(d: dict) -> HPolytope:
    n = d["ambient_dim"]
    return HPolytope(
        n,
        tuple(_row_from_json(r, n) for r in d.get("inequalities", [])),
        tuple(_row_from_json(r, n) for r in d.get("equations", [])),
    )


def vpolytope_to_json(p: VPolytope) -> dict:
    return {
        "ambient_dim": p.ambient_dim,
        "vertices": [[rational_to_json(x) for x in v] for v in p.vertices],
    }


def vpolytope_from_json(d: dict) -> VPolytope:
    pts = [tuple(rational_from_json(x) for x in v) for v in d["vertices"]]
    n = d.get("ambient_dim", len(pts[0]) if pts else None)
    if n is None:
        raise PolytopeError("ambient_dim required for an empty vertex list")
    return VPolytope.hull(pts, n)


def dumps(obj: HPolytope | VPolytope) -> str:
    if isinstance(obj, HPolytope):
        return json.dumps(hpolytope_to_json(obj))
    return json.dumps(vpolytope_to_json(obj))
