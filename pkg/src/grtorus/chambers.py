"""Directed chamber decompositions of a polytope by oriented hyperplanes.

Every wall ``alpha`` comes with a positive closed side ``H_alpha^+``.  For a
sign set ``J`` (the walls on whose positive side we stay) the cell is

    P_J = P  cap  (H_alpha^+ for alpha in J)  cap  (H_alpha^- for alpha not in J)

and it is a chamber when full-dimensional.  Its positive boundary is the
union of the facets lying on the boundary of P or on a wall from ``J``.

The degree-5 del Pezzo case uses the cross-section polytope of the
effective cone with one wall per exceptional curve, positive side
``{v : v . C >= 0}``.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import jsonschema

from . import _exact as ex
from . import lattice as lat
from .polytope import (AffineHalfspace, HPolytope, VPolytope, dim,
                       hpolytope_from_json, interior_point, rational_from_json, rational_to_json,
                       standard_hypersimplex, to_hpolytope, vertices, vpolytope_from_json,
                       vpolytope_to_json)

log = logging.getLogger(__name__)


class ArrangementError(ValueError):
    pass


class RetractionError(ValueError):
    pass


@dataclass(frozen=True)
class DirectedArrangement:
    base: VPolytope
    walls: tuple  # ((label, AffineHalfspace), ...) in a fixed order
    base_facet_names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple((l, h) for l, h in self.walls))
        labels = [l for l, _ in self.walls]
        if len(set(labels)) != len(labels):
            raise ArrangementError("wall labels must be distinct")
        keys = [self._restricted_key(h) for _, h in self.walls]
        if any(k is None for k in keys):
            raise ArrangementError("a wall is constant on the affine hull of the base")
        if len(set(keys)) != len(keys):
            raise ArrangementError("two walls define the same hyperplane on the base")
        if self.base_facet_names is not None and len(self.base_facet_names) != len(self.base.facets):
            raise ArrangementError("one name per base facet expected")

    def _restricted_key(self, h: AffineHalfspace):
        """Hyperplane key of a wall modulo the affine equations of the base."""
        eqs = self.base.hull_equations
        a, c = h.normal, -h.offset
        if eqs:
            ea = [e.normal for e in eqs]
            gram = [[ex.dot(x, y) for y in ea] for x in ea]
            lam = ex.solve(gram, [ex.dot(a, x) for x in ea])
            a = tuple(ai - sum(l * x[k] for l, x in zip(lam, ea)) for k, ai in enumerate(a))
            c = c + sum(l * e.offset for l, e in zip(lam, eqs))
        if not any(a):
            return None
        return AffineHalfspace(a, -c).hyperplane_key()

    @property
    def labels(self) -> tuple:
        return tuple(l for l, _ in self.walls)

    @cached_property
    def _wall_map(self) -> dict:
        return dict(self.walls)

    def wall(self, label) -> AffineHalfspace:
        return self._wall_map[label]

    @cached_property
    def _index(self) -> dict:
        return {l: i for i, l in enumerate(self.labels)}

    def index(self, label) -> int:
        return self._index[label]

    @cached_property
    def base_h(self) -> HPolytope:
        return to_hpolytope(self.base)

    def facet_name(self, k: int) -> str:
        return self.base_facet_names[k] if self.base_facet_names else f"F{k}"

    def missed_walls(self) -> tuple:
        """Walls whose hyperplane does not meet the base at all."""
        out = []
        for l, h in self.walls:
            vals = [h.value(v) for v in self.base.vertices]
            if all(x > 0 for x in vals) or all(x < 0 for x in vals):
                out.append(l)
        return tuple(out)

    def cell_halfspaces(self, sign_set: Iterable) -> tuple:
        sign_set = frozenset(sign_set)
        return tuple(h if l in sign_set else h.opposite() for l, h in self.walls)


class ChamberFacet(NamedTuple):
    halfspace: AffineHalfspace
    vertices: frozenset  # indices into the chamber body's vertices
    supports: tuple  # ("boundary", k) for base facet k, ("wall", label)


@dataclass(frozen=True)
class DirectedChamber:
    sign_set: frozenset
    complement: frozenset
    body: VPolytope
    facets: tuple
    positive_facets: tuple

    def on_positive_boundary(self, x: Sequence) -> bool:
        x = ex.fvec(x)
        return self.body.contains(x) and any(f.halfspace.on_boundary(x) for f in self.positive_facets)


@dataclass(frozen=True)
class Decomposition:
    arrangement: DirectedArrangement
    chambers: tuple
    missed_walls: tuple = ()

    @cached_property
    def central(self) -> DirectedChamber | None:
        full = frozenset(self.arrangement.labels)
        return next((c for c in self.chambers if c.sign_set == full), None)

    @cached_property
    def _by_complement(self) -> dict:
        return {c.complement: c for c in self.chambers}

    def by_complement(self, complement: Iterable) -> DirectedChamber | None:
        return self._by_complement.get(frozenset(complement))

    def complements(self) -> set:
        return set(self._by_complement)

    def __len__(self) -> int:
        return len(self.chambers)


# -- building chambers ------------------------------------------------------

def _sort_key(a: DirectedArrangement):
    def key(c: DirectedChamber):
        return len(c.complement), tuple(sorted(a.index(l) for l in c.complement))
    return key


def chamber_body(a: DirectedArrangement, sign_set: Iterable) -> VPolytope:
    h = a.base_h
    return vertices(HPolytope(h.ambient_dim, h.halfspaces + a.cell_halfspaces(sign_set),
                              h.equations))


def make_chamber(a: DirectedArrangement, sign_set: Iterable,
                 body: VPolytope | None = None) -> DirectedChamber | None:
    """The directed chamber with sign set ``J``, or None if P_J is not full-dimensional."""
    sign_set = frozenset(sign_set)
    if not sign_set <= set(a.labels):
        raise ArrangementError(f"unknown walls in sign set: {sign_set - set(a.labels)}")
    if body is None:
        body = chamber_body(a, sign_set)
    if body.is_empty or dim(body) != dim(a.base):
        return None
    facets = []
    positive = []
    for f in body.facets:
        pts = [body.vertices[i] for i in f.vertices]
        supports = []
        for k, bf in enumerate(a.base.facets):
            if all(bf.halfspace.on_boundary(p) for p in pts):
                supports.append(("boundary", k))
        for l, h in a.walls:
            if all(h.on_boundary(p) for p in pts):
                supports.append(("wall", l))
        cf = ChamberFacet(f.halfspace, f.vertices, tuple(supports))
        facets.append(cf)
        if any(kind == "boundary" or lab in sign_set for kind, lab in supports):
            positive.append(cf)
    return DirectedChamber(sign_set, frozenset(a.labels) - sign_set, body,
                           tuple(facets), tuple(positive))


def enumerate_chambers(a: DirectedArrangement) -> Decomposition:
    """All chambers, found by splitting the base one wall at a time.

    Cells that stop being full-dimensional are discarded at once, so the
    work is proportional to the number of intermediate chambers rather than
    to 2^(number of walls).
    """
    d = dim(a.base)
    if d < 0:
        raise ArrangementError("empty base polytope")
    missed = a.missed_walls()
    for l in missed:
        log.warning("wall %s does not meet the base polytope", l)
    h = a.base_h
    cells = [(frozenset(), (), a.base)]
    for label, wall in a.walls:
        nxt = []
        for sign_set, hs, _ in cells:
            for positive in (True, False):
                side = wall if positive else wall.opposite()
                rows = hs + (side,)
                body = vertices(HPolytope(h.ambient_dim, h.halfspaces + rows, h.equations))
                if not body.is_empty and dim(body) == d:
                    nxt.append((sign_set | {label} if positive else sign_set, rows, body))
        cells = nxt
    chambers = [make_chamber(a, s, body) for s, _, body in cells]
    chambers.sort(key=_sort_key(a))
    return Decomposition(a, tuple(chambers), missed)


def brute_force_chambers(a: DirectedArrangement) -> Decomposition:
    """Test every one of the 2^|walls| sign sets for full dimension."""
    labels = a.labels
    out = []
    for bits in itertools.product((True, False), repeat=len(labels)):
        c = make_chamber(a, (l for l, b in zip(labels, bits) if b))
        if c is not None:
            out.append(c)
    out.sort(key=_sort_key(a))
    return Decomposition(a, tuple(out), a.missed_walls())


def chambers_from_complements(a: DirectedArrangement, complements: Iterable[Iterable]) -> Decomposition:
    """Chambers among the candidate sign sets given by their complements."""
    full = frozenset(a.labels)
    out = []
    for comp in complements:
        c = make_chamber(a, full - frozenset(comp))
        if c is not None:
            out.append(c)
    out.sort(key=_sort_key(a))
    return Decomposition(a, tuple(out), a.missed_walls())


# -- the del Pezzo arrangement ----------------------------------------------

def _dp5_facet_names(base: VPolytope) -> tuple:
    names = []
    for f in base.facets:
        labels = [lat.label_of_class(base.vertices[i]) for i in f.vertices]
        if len(labels) == 4:
            (i,) = set.intersection(*(set(l.pair) for l in labels))
            names.append(f"T{i}")
        elif len(labels) == 6:
            (i,) = set(lat.INDICES) - set().union(*(l.pair for l in labels))
            names.append(f"O{i}")
        else:
            raise AssertionError(f"unexpected facet with {len(labels)} vertices")
    return tuple(names)


def dp5_arrangement() -> DirectedArrangement:
    from .polytope import cross_section_P
    base = cross_section_P()
    walls = tuple((l, AffineHalfspace(lat.curve_class(l).form_vector(), 0)) for l in lat.ALL_LABELS)
    return DirectedArrangement(base, walls, _dp5_facet_names(base))


_DP5_CACHE: dict = {}


def dp5_decomposition(method: str = "independent_sets") -> Decomposition:
    """Chambers of the del Pezzo arrangement.

    ``method`` is ``"independent_sets"`` (candidates whose complement is an
    independent set of the intersection graph), ``"split"`` (generic
    splitting) or ``"brute_force"`` (all 1024 sign sets).  Results are cached.
    """
    if method not in _DP5_CACHE:
        a = dp5_arrangement()
        if method == "independent_sets":
            d = chambers_from_complements(a, lat.independent_sets())
        elif method == "split":
            d = enumerate_chambers(a)
        elif method == "brute_force":
            d = brute_force_chambers(a)
        else:
            raise ValueError(f"unknown method {method!r}")
        _DP5_CACHE[method] = d
    return _DP5_CACHE[method]


def levels(d: Decomposition) -> dict[int, list]:
    """Chambers grouped by k = 5 - (number of contracted curves)."""
    out: dict[int, list] = {k: [] for k in range(1, 6)}
    for c in d.chambers:
        k = 5 - len(c.complement)
        if k not in out:
            raise ArrangementError(f"chamber contracting {len(c.complement)} curves")
        out[k].append(c)
    return out


def hypersimplex_arrangement() -> DirectedArrangement:
    """Delta(2,5) with walls x_i + x_j = 1, positive side x_i + x_j <= 1."""
    base = standard_hypersimplex()
    walls = []
    for l in lat.ALL_LABELS:
        normal = tuple(-int(k in l.pair) for k in lat.INDICES)
        walls.append((l, AffineHalfspace(normal, -1)))
    return DirectedArrangement(base, tuple(walls))


def dp5_to_hypersimplex_map():
    """Affine map sending each class C_ij to e_i + e_j, as a function on points."""
    src = [lat.curve_class(l).coeffs + (1,) for l in lat.ALL_LABELS]
    dst = [tuple(int(k in l.pair) for k in lat.INDICES) for l in lat.ALL_LABELS]
    rows = []
    for r in range(5):
        sol = ex.solve(src, [t[r] for t in dst])
        if sol is None:
            raise AssertionError("no affine map sends the curve classes to the hypersimplex")
        rows.append(sol)

    def apply(v: Sequence) -> tuple:
        w = ex.fvec(v) + (Fraction(1),)
        return tuple(ex.dot(row, w) for row in rows)

    return apply


# -- positive boundary and the lemmas ----------------------------------------

def positive_boundary(c: DirectedChamber) -> list[VPolytope]:
    """Facets making up the positive boundary, each as its own polytope."""
    return [VPolytope(tuple(c.body.vertices[i] for i in f.vertices), c.body.ambient_dim)
            for f in c.positive_facets]


@dataclass
class LemmaReport:
    passed: bool
    checked_pairs: int
    failures: list = field(default_factory=list)  # (I-complement, J-complement, witness)


def _face_on(c: DirectedChamber, a: DirectedArrangement, labels: Iterable) -> list:
    hs = [a.wall(l) for l in labels]
    return [v for v in c.body.vertices if all(h.on_boundary(v) for h in hs)]


def check_positive_intersection(d: Decomposition) -> LemmaReport:
    """For chambers with J not a subset of I, check that P_I cap P_J lies in the positive boundary of P_J.

    P_I cap P_J is the face of P_J cut out by the walls on which I and J
    disagree, computed from both sides as a consistency check.  A face lies
    in the union of the positive facets iff it lies in one of them; the
    witness of a failure is the barycenter of the face.
    """
    a = d.arrangement
    report = LemmaReport(True, 0)
    for cj in d.chambers:
        for ci in d.chambers:
            if ci is cj or cj.sign_set <= ci.sign_set:
                continue
            report.checked_pairs += 1
            diff = ci.sign_set ^ cj.sign_set
            face = _face_on(cj, a, diff)
            if set(face) != set(_face_on(ci, a, diff)):
                report.passed = False
                report.failures.append((ci.complement, cj.complement, "inconsistent intersection"))
                continue
            if not face:
                continue
            if not any(all(f.halfspace.on_boundary(v) for v in face) for f in cj.positive_facets):
                m = len(face)
                witness = tuple(sum(col) / m for col in zip(*face))
                report.passed = False
                report.failures.append((ci.complement, cj.complement, witness))
    return report


def origin_is_admissible(d: Decomposition, origin: Sequence) -> bool:
    """Strictly inside every positive wall side and the relative interior of the base."""
    a = d.arrangement
    origin = ex.fvec(origin)
    return (all(e.on_boundary(origin) for e in a.base.hull_equations)
            and all(f.halfspace.value(origin) > 0 for f in a.base.facets)
            and all(h.value(origin) > 0 for _, h in a.walls))


def default_origin(d: Decomposition) -> tuple:
    if d.central is None:
        raise RetractionError("the decomposition has no central chamber")
    return interior_point(d.central.body)


def retract(c: DirectedChamber, v: Sequence, origin: Sequence,
            decomposition: Decomposition | None = None) -> tuple:
    """Far endpoint of the chord of ``c.body`` along the ray from ``origin`` through ``v``.

    ``origin`` must lie strictly inside the central region; pass the
    decomposition to have that checked.  The result lies on the positive
    boundary of ``c``.
    """
    v = ex.fvec(v)
    origin = ex.fvec(origin)
    if decomposition is not None:
        if decomposition.central is not None and c.sign_set == decomposition.central.sign_set:
            raise RetractionError("the central chamber is not retracted")
        if not origin_is_admissible(decomposition, origin):
            raise RetractionError("origin is not interior to the central region")
    if not c.body.contains(v):
        raise RetractionError(f"point {v} is not in the chamber")
    if c.body.contains(origin):
        raise RetractionError("origin lies in the chamber")
    # Along o + t (v - o) each facet value is affine in t; in scaled integers
    # it crosses zero at t = H(o) D / (H(o) D - H(v) E) for v = X / D, o = Y / E.
    X, D = ex.integer_point(v)
    Y, E = ex.integer_point(origin)
    lo, hi = None, None
    for f in c.facets:
        h0 = f.halfspace.scaled_value(Y, E) * D
        h1 = f.halfspace.scaled_value(X, D) * E
        if h1 == h0:
            continue
        t = Fraction(h0, h0 - h1)
        if h1 > h0:
            lo = t if lo is None or t > lo else lo
        else:
            hi = t if hi is None or t < hi else hi
    if lo is None or hi is None:
        raise RetractionError("chamber is unbounded along the ray")
    # the origin is outside the chamber, so 0 < lo <= 1 <= hi
    return tuple(o + hi * (x - o) for o, x in zip(origin, v))


def sample_points(c: DirectedChamber, n: int, seed: int = 0, interior: bool = True) -> list[tuple]:
    """Seeded random rational points of ``c.body`` as weighted vertex averages.

    With ``interior=True`` every weight is positive, so the points lie in
    the relative interior.
    """
    rng = random.Random(seed)
    X, D = ex.integer_point(x for v in c.body.vertices for x in v)
    n_dim = c.body.ambient_dim
    verts = [X[k:k + n_dim] for k in range(0, len(X), n_dim)]
    out = []
    low = 1 if interior else 0
    while len(out) < n:
        w = [rng.randint(low, 12) for _ in verts]
        total = sum(w)
        if total == 0:
            continue
        out.append(tuple(Fraction(sum(wk * v[i] for wk, v in zip(w, verts)), total * D)
                         for i in range(n_dim)))
    return out


# -- model classification ----------------------------------------------------

@dataclass(frozen=True)
class SurfaceBlowdown:
    contracted: frozenset

    def __post_init__(self):
        object.__setattr__(self, "contracted", frozenset(self.contracted))
        if len(self.contracted) > 4:
            raise ValueError("at most four disjoint exceptional curves can be contracted")
        for a, b in itertools.combinations(self.contracted, 2):
            if lat.curves_intersect(a, b):
                raise ValueError(f"contracted curves {a} and {b} intersect")

    @property
    def surface(self) -> str:
        k = len(self.contracted)
        if k == 3 and not set.intersection(*(set(l.pair) for l in self.contracted)):
            return "CP1xCP1"
        if k == 4:
            return "CP2"
        return "dP5" if k == 0 else f"Bl{4 - k}CP2"


@dataclass(frozen=True)
class ConicBundle:
    axis: int  # index i of the octahedral facet O_i


@dataclass(frozen=True)
class PointModel:
    pass


ModelType = SurfaceBlowdown | ConicBundle | PointModel


def classify_model(dv) -> ModelType:
    """Birational model of the surface defined by a class of the cross-section polytope.

    Classes with negative canonical degree are first rescaled onto the slice
    ``K . v = -1``, since the model only depends on the ray.
    """
    a = dp5_arrangement()
    point = dv.coeffs if isinstance(dv, lat.DivisorClass) else ex.fvec(dv)
    k = lat.pair_product(lat.canonical_class(), lat.DivisorClass(point))
    if k < 0:
        point = tuple(x / -k for x in point)
    if not a.base.contains(point):
        raise ValueError(f"{point} is not in the cross-section polytope")
    tight = [k for k, f in enumerate(a.base.facets) if f.halfspace.on_boundary(point)]
    if not tight:
        return SurfaceBlowdown(lat.contracted_curves(lat.DivisorClass(point)))
    if len(tight) == 1 and a.facet_name(tight[0]).startswith("O"):
        return ConicBundle(int(a.facet_name(tight[0])[1:]))
    return PointModel()


# -- exports -----------------------------------------------------------------

def adjacency(d: Decomposition) -> list[tuple[int, int]]:
    """Index pairs of chambers sharing a facet."""
    owners: dict = {}
    for k, c in enumerate(d.chambers):
        for f in c.facets:
            key = frozenset(c.body.vertices[i] for i in f.vertices)
            owners.setdefault(key, []).append(k)
    pairs = set()
    for ks in owners.values():
        for x, y in itertools.combinations(sorted(ks), 2):
            pairs.add((x, y))
    return sorted(pairs)


def _node_id(c: DirectedChamber, a: DirectedArrangement) -> str:
    labels = sorted(c.complement, key=a.index)
    return "J_" + ("_".join(str(l) for l in labels) if labels else "all")


def adjacency_dot(d: Decomposition) -> str:
    a = d.arrangement
    lines = ["graph chambers {"]
    lines += [f"  {_node_id(c, a)};" for c in d.chambers]
    for x, y in adjacency(d):
        lines.append(f"  {_node_id(d.chambers[x], a)} -- {_node_id(d.chambers[y], a)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _support_name(a: DirectedArrangement, s) -> str:
    kind, lab = s
    return a.facet_name(lab) if kind == "boundary" else f"wall:{lab}"


def chamber_records(d: Decomposition, with_level: bool = True) -> list[dict]:
    a = d.arrangement
    out = []
    for c in d.chambers:
        rec = {"J_complement": [str(l) for l in sorted(c.complement, key=a.index)]}
        if with_level:
            rec["level"] = 5 - len(c.complement)
        rec["n_vertices"] = len(c.body.vertices)
        rec["positive_facets"] = [
            {"supports": [_support_name(a, s) for s in f.supports], "n_vertices": len(f.vertices)}
            for f in c.positive_facets]
        out.append(rec)
    return out


# -- arrangement files ---------------------------------------------------------

_RATIONAL = {"oneOf": [{"type": "integer"},
                       {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_ROW = {"type": "array", "items": _RATIONAL, "minItems": 2}

ARRANGEMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["base", "walls"],
    "additionalProperties": False,
    "properties": {
        "base": {
            "oneOf": [
                {"type": "object", "required": ["vertices"], "additionalProperties": False,
                 "properties": {"ambient_dim": {"type": "integer", "minimum": 1},
                                "vertices": {"type": "array", "items": _ROW | {"minItems": 1},
                                             "minItems": 1}}},
                {"type": "object", "required": ["ambient_dim", "inequalities"],
                 "additionalProperties": False,
                 "properties": {"ambient_dim": {"type": "integer", "minimum": 1},
                                "inequalities": {"type": "array", "items": _ROW},
                                "equations": {"type": "array", "items": _ROW}}},
            ]
        },
        "walls": {
            "type": "array",
            "items": {"type": "object", "required": ["label", "row"], "additionalProperties": False,
                      "properties": {"label": {"type": "string", "minLength": 1}, "row": _ROW}},
        },
        "facet_names": {"type": "array", "items": {"type": "string"}},
    },
}


def arrangement_to_json(a: DirectedArrangement) -> dict:
    """Serializable form: base by vertices, walls as rows ``[u_1..u_n, b]`` for ``<u, x> >= b``."""
    out = {
        "base": vpolytope_to_json(a.base),
        "walls": [{"label": str(l), "row": [rational_to_json(x) for x in h.normal + (h.offset,)]}
                  for l, h in a.walls],
    }
    if a.base_facet_names is not None:
        out["facet_names"] = list(a.base_facet_names)
    return out


def arrangement_from_json(data) -> DirectedArrangement:
    """Validate against :data:`ARRANGEMENT_SCHEMA` and build the arrangement.

    Raises ``jsonschema.ValidationError`` for malformed input and
    :class:`PolytopeError` / :class:`ArrangementError` for inconsistent data,
    including unbounded or empty bases.
    """
    jsonschema.validate(data, ARRANGEMENT_SCHEMA)
    b = data["base"]
    if "vertices" in b:
        base = vpolytope_from_json(b)
    else:
        base = vertices(hpolytope_from_json(b))
        if base.is_empty:
            raise ArrangementError("the base polytope is empty")
    walls = []
    for w in data["walls"]:
        row = [rational_from_json(x) for x in w["row"]]
        if len(row) != base.ambient_dim + 1:
            raise ArrangementError(f"wall {w['label']!r} has the wrong length")
        walls.append((w["label"], AffineHalfspace(tuple(row[:-1]), row[-1])))
    names = tuple(data["facet_names"]) if "facet_names" in data else None
    return DirectedArrangement(base, tuple(walls), names)
