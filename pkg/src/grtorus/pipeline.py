"""Integral homology of Gr(2, C^5) / T assembled from the chamber filtration.

The orbit space is filtered by V_0 (over the boundary of the polytope)
inside V_5 (everything).  H_*(V_5, V_0) comes from the central chamber via
relative Kunneth once every other chamber is certified to collapse onto its
positive boundary; H_*(V_0) comes from a sphere-plus-cells model; the long
exact sequence of the pair is then solved degree by degree, refusing any
segment it cannot determine.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import chambers as ch
from . import lattice as lat
from .homology import (ZERO, Z, FGAbelianGroup, GroupHom, HomologyTable, IntegerMatrix,
                       UnsupportedSequenceError, chain_complex_homology, invariant_factors,
                       kunneth, simplicial_chain_complex, simplicial_homology, solve_flanked,
                       solve_four_term)
from .polytope import VPolytope, cross_section_P, dim, interior_point, triangulate

TOP_DEGREE = 8

SPHERE_3 = HomologyTable({0: Z, 3: Z})
DISC_PAIR_4 = HomologyTable({4: Z})
EXPECTED_ORBIT_HOMOLOGY = HomologyTable({0: Z, 5: FGAbelianGroup(0, (2,)), 8: Z})


class PipelineError(RuntimeError):
    pass


class CertificateError(PipelineError):
    def __init__(self, message: str, witness=None):
        super().__init__(message if witness is None else f"{message}; witness: {witness}")
        self.witness = witness


# -- cited facts ---------------------------------------------------------------

@dataclass(frozen=True)
class CitedFact:
    """A topological input the pipeline uses without recomputing it."""

    key: str
    statement: str
    justification: str

    def to_json(self) -> dict:
        return {"key": self.key, "statement": self.statement, "justification": self.justification}


IOTA3_VANISHES = CitedFact(
    key="iota3_zero",
    statement="The inclusion V_0 -> V_5 induces the zero map on H_3.",
    justification=("H_3(V_0) is generated by the image of a section over the boundary 3-sphere "
                   "of the polytope; the section extends over the whole polytope, which has "
                   "H_3 = 0, so the class bounds in V_5."),
)

DEFAULT_FACTS = (IOTA3_VANISHES,)


# -- models of the fibres ----------------------------------------------------------

def homology_of_model(m: ch.ModelType) -> HomologyTable:
    """Homology of the quotient surface, curve or point attached to a class."""
    if isinstance(m, ch.PointModel):
        return HomologyTable({0: Z})
    if isinstance(m, ch.ConicBundle):
        return HomologyTable({0: Z, 2: Z})
    if isinstance(m, ch.SurfaceBlowdown):
        if m.surface == "CP1xCP1":
            sphere = HomologyTable({0: Z, 2: Z})
            return kunneth(sphere, sphere)
        blown_up_points = 4 - len(m.contracted)
        return HomologyTable({0: Z, 2: FGAbelianGroup.free(blown_up_points + 1), 4: Z})
    raise TypeError(f"not a model: {m!r}")


def relative_kunneth(hY: HomologyTable, pair: HomologyTable = DISC_PAIR_4) -> HomologyTable:
    """H_*(A x Y, B x Y) from H_*(A, B) and H_*(Y); (A, B) defaults to (D^4, S^3)."""
    return kunneth(pair, hY)


def relative_simplicial_homology(simplices: Iterable[Sequence],
                                 subcomplex: Iterable[Sequence]) -> HomologyTable:
    """H_*(K, L) for a simplicial complex K and a subcomplex L, both given by generating simplices."""
    ordered, boundaries = simplicial_chain_complex(simplices)
    sub = set()
    for s in subcomplex:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            sub.update(itertools.combinations(s, k))
    keep = {k: [i for i, f in enumerate(v) if f not in sub] for k, v in ordered.items()}
    rel = {}
    for k, mat in boundaries.items():
        rows, cols = keep[k - 1], keep[k]
        rel[k] = IntegerMatrix.from_rows([[mat[r, c] for c in cols] for r in rows], len(cols))
    return chain_complex_homology(rel, {k: len(v) for k, v in keep.items()})


def boundary_complex(p: VPolytope) -> list[tuple]:
    """Top simplices of a triangulation of the boundary of ``p`` (facet-wise pulling)."""
    return [s for f in p.facets for s in triangulate(p, f.vertices)]


@lru_cache(maxsize=16)
def polytope_pair_homology(p: VPolytope) -> HomologyTable:
    """H_*(p, boundary of p) from explicit triangulations."""
    return relative_simplicial_homology(triangulate(p), boundary_complex(p))


# -- contractibility certificate ------------------------------------------------------

@dataclass(frozen=True)
class ChamberCertificate:
    complement: tuple  # labels as strings
    positive_facets: int
    points_checked: int


@dataclass(frozen=True)
class ContractibilityCertificate:
    central_vertices: int
    chambers: tuple  # ChamberCertificate for every non-central chamber
    positive_intersection_pairs: int
    samples_per_chamber: int
    seed: int

    @property
    def passed(self) -> bool:
        return True  # failures raise instead of producing a certificate

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "central_vertices": self.central_vertices,
            "certified_chambers": len(self.chambers),
            "points_checked": sum(c.points_checked for c in self.chambers),
            "positive_intersection_pairs": self.positive_intersection_pairs,
            "samples_per_chamber": self.samples_per_chamber,
            "seed": self.seed,
        }


def _expected_positive(c: ch.DirectedChamber, a: ch.DirectedArrangement) -> set:
    """Positive facets of ``c`` recomputed from vertex incidences alone."""
    out = set()
    for f in c.facets:
        pts = [c.body.vertices[i] for i in f.vertices]
        on_base = any(all(bf.halfspace.on_boundary(p) for p in pts) for bf in a.base.facets)
        on_wall = any(all(a.wall(l).on_boundary(p) for p in pts) for l in c.sign_set)
        if on_base or on_wall:
            out.add(f.vertices)
    return out


def contractibility_certificate(d: ch.Decomposition, samples: int = 8,
                                seed: int = 0) -> ContractibilityCertificate:
    """Check that every non-central chamber deformation-retracts onto its positive boundary.

    Raises :class:`CertificateError` with a witness on the first failure.
    """
    a = d.arrangement
    central = d.central
    if central is None:
        raise CertificateError("no central chamber: the retraction has no admissible origin")
    if dim(central.body) != dim(a.base):
        raise CertificateError("central chamber is not full-dimensional",
                               sorted(map(str, central.complement)))
    origin = ch.default_origin(d)
    if not ch.origin_is_admissible(d, origin):
        raise CertificateError("barycenter of the central chamber is not strictly positive", origin)
    certs = []
    for k, c in enumerate(d.chambers):
        if c is central:
            continue
        name = tuple(str(l) for l in sorted(c.complement, key=a.index))
        declared = {f.vertices for f in c.positive_facets}
        if not declared:
            raise CertificateError("empty positive boundary", name)
        if declared != _expected_positive(c, a):
            raise CertificateError("positive facets disagree with the wall incidences", name)
        points = list(c.body.vertices) + ch.sample_points(c, samples, seed + k)
        for v in points:
            u = ch.retract(c, v, origin)
            if not c.on_positive_boundary(u):
                raise CertificateError("retraction leaves the positive boundary", (name, v, u))
            if ch.retract(c, u, origin) != u:
                raise CertificateError("retraction is not idempotent", (name, u))
        certs.append(ChamberCertificate(name, len(declared), len(points)))
    lemma = ch.check_positive_intersection(d)
    if not lemma.passed:
        raise CertificateError("chamber intersections leave the positive boundary", lemma.failures[0])
    return ContractibilityCertificate(len(central.body.vertices), tuple(certs),
                                      lemma.checked_pairs, samples, seed)


# -- V_0 -----------------------------------------------------------------------------

def solve_pair_sequence(sub: HomologyTable, rel: HomologyTable,
                        connecting: Mapping[int, GroupHom] | None = None,
                        top: int = TOP_DEGREE) -> HomologyTable:
    """H_*(X) from the long exact sequence of a pair (X, A).

    ``sub`` is H_*(A), ``rel`` is H_*(X, A) and ``connecting[i]`` the map
    H_i(X, A) -> H_{i-1}(A).  It is needed only where both ends are nonzero;
    elsewhere the map is zero.  Each H_i(X) is an extension of ker d_i by
    coker d_{i+1} and is only returned when one of the two vanishes.
    """
    connecting = dict(connecting or {})

    def kernel_and_cokernel(i: int) -> tuple[FGAbelianGroup, FGAbelianGroup]:
        src, dst = rel[i], sub[i - 1] if i > 0 else ZERO
        if src.is_zero or dst.is_zero:
            return src, dst
        if i not in connecting:
            raise UnsupportedSequenceError(
                f"connecting map H_{i}(X,A) = {src} -> H_{i - 1}(A) = {dst} is unknown")
        f = connecting[i]
        if f.domain != src or f.codomain != dst:
            raise UnsupportedSequenceError(f"connecting map in degree {i} has the wrong shape")
        return solve_four_term(f)

    out = {}
    for i in range(top + 1):
        ker_i, _ = kernel_and_cokernel(i)
        _, coker_next = kernel_and_cokernel(i + 1)
        out[i] = solve_flanked(coker_next, ker_i)
    return HomologyTable(out)


@dataclass(frozen=True)
class V0Model:
    boundary_sphere: HomologyTable  # H_*(boundary of P), recomputed
    cells: int  # number of attached open 5-cells
    table: HomologyTable


@lru_cache(maxsize=16)
def v0_model(p: VPolytope | None = None) -> V0Model:
    """H_*(V_0) from a section over the polytope boundary plus one 5-cell per octahedral facet."""
    p = cross_section_P() if p is None else p
    sphere = simplicial_homology(boundary_complex(p))
    if sphere != SPHERE_3:
        raise PipelineError(f"boundary of the polytope is not a homology 3-sphere: {sphere}")
    cells = sum(1 for f in p.facets if len(f.vertices) == 6)
    wedge = HomologyTable({5: FGAbelianGroup.free(cells)})
    return V0Model(sphere, cells, solve_pair_sequence(sphere, wedge))


def v0_homology() -> HomologyTable:
    return v0_model().table


# -- the connecting map in degree 6 -------------------------------------------------

class RelativeClassLabel(NamedTuple):
    """Pair {i, j} naming one of the ten generators of H_6(V_5, V_0)."""

    i: int
    j: int

    def __str__(self) -> str:
        return f"D{self.i}{self.j}"


RELATIVE_CLASSES = tuple(RelativeClassLabel(l.i, l.j) for l in lat.ALL_LABELS)


def boundary_matrix(perm: Sequence[int] | None = None) -> IntegerMatrix:
    """10 x 5 degree matrix: generator {i, j} goes to S_i + S_j.

    With ``perm`` the indices are relabeled first, so the rows are the
    permuted pair vectors.
    """
    perm = tuple(perm) if perm is not None else lat.INDICES
    if sorted(perm) != list(lat.INDICES):
        raise ValueError(f"not a permutation of 1..5: {perm!r}")
    rows = []
    for g in RELATIVE_CLASSES:
        image = {perm[g.i - 1], perm[g.j - 1]}
        rows.append([int(k in image) for k in lat.INDICES])
    return IntegerMatrix.from_rows(rows, 5)


def degree_rule_holds(m: IntegerMatrix) -> bool:
    """Every generator hits exactly two spheres with degree one."""
    return (m.shape == (10, 5)
            and all(sorted(m[r, c] for c in range(5)) == [0, 0, 0, 1, 1] for r in range(10))
            and all(sum(m[r, c] for r in range(10)) == 4 for c in range(5)))


# -- disc model ------------------------------------------------------------------------

def disc_model(u: Sequence[float], y: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """Collapse D^k cap {u_k >= 0} x S^m onto D^{k+m}: ``(u, y) -> (u_1..u_{k-1}, sqrt(1 - |u|^2) y)``.

    The image has squared norm ``1 - u_k^2``, so it meets the boundary
    sphere exactly over ``u_k = 0``.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.ndim != 1 or y.ndim != 1 or u.size < 1 or y.size < 1:
        raise ValueError("u and y must be nonempty vectors")
    if u[-1] < -tol:
        raise ValueError("u must lie in the closed upper halfspace")
    nu = float(u @ u)
    if nu > 1 + tol:
        raise ValueError("u must lie in the closed unit disc")
    if abs(float(y @ y) - 1) > tol:
        raise ValueError("y must lie on the unit sphere")
    return np.concatenate([u[:-1], math.sqrt(max(0.0, 1 - nu)) * y])


# -- assembly ------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelRecord:
    level: int
    chambers: int
    certified: bool
    groups: HomologyTable  # relative groups this level contributes (absolute ones at level 0)

    def to_json(self) -> dict:
        return {"chambers": self.chambers, "certified": self.certified,
                "groups": self.groups.to_json()}


@dataclass(frozen=True)
class FiltrationReport:
    levels: tuple  # LevelRecord for k = 0..5

    def counts(self) -> dict[int, int]:
        return {r.level: r.chambers for r in self.levels if r.level > 0}

    def to_json(self) -> dict:
        return {str(r.level): r.to_json() for r in self.levels}


@dataclass(frozen=True)
class PipelineReport:
    table: HomologyTable
    relative: HomologyTable
    v0: V0Model
    fibre: HomologyTable
    central_pair: HomologyTable
    boundary: IntegerMatrix
    snf_invariants: tuple
    degree_rule: bool
    certificate: ContractibilityCertificate
    filtration: FiltrationReport
    facts: tuple
    euler: dict = field(default_factory=dict)

    @property
    def matches_expected(self) -> bool:
        return self.table == EXPECTED_ORBIT_HOMOLOGY

    @property
    def ok(self) -> bool:
        return (self.matches_expected and self.degree_rule and self.certificate.passed
                and self.euler.get("consistent", False))

    def to_json(self) -> dict:
        return {
            "homology": self.table.to_json(),
            "levels": {str(k): v for k, v in sorted(self.filtration.counts().items())},
            "filtration": self.filtration.to_json(),
            "certificate": self.certificate.to_json(),
            "snf_invariants": list(self.snf_invariants),
            "degree_rule": self.degree_rule,
            "intermediates": {
                "fibre_over_central_chamber": self.fibre.to_json(),
                "central_chamber_pair": self.central_pair.to_json(),
                "relative_V5_V0": self.relative.to_json(),
                "boundary_sphere": self.v0.boundary_sphere.to_json(),
                "V0": self.v0.table.to_json(),
                "attached_5_cells": self.v0.cells,
                "boundary_matrix": self.boundary.to_json(),
            },
            "euler_characteristic": self.euler,
            "cited_facts": [f.to_json() for f in self.facts],
            "matches_expected": self.matches_expected,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _connecting_maps(rel: HomologyTable, v0: HomologyTable, boundary: IntegerMatrix,
                     facts: Sequence[CitedFact]) -> dict[int, GroupHom]:
    maps = {}
    if IOTA3_VANISHES in facts:
        # iota_3 = 0 makes H_4(V_5, V_0) -> H_3(V_0) onto; an onto map Z -> Z is +-1
        if rel[4] == Z and v0[3] == Z:
            maps[4] = GroupHom(Z, Z, IntegerMatrix.identity(1))
    maps[6] = GroupHom(rel[6], v0[5], boundary.T, on_generators=True)
    return maps


def run_pipeline(perm: Sequence[int] | None = None, *,
                 decomposition: ch.Decomposition | None = None,
                 certificate: ContractibilityCertificate | None = None,
                 samples: int = 8, seed: int = 0,
                 facts: Sequence[CitedFact] = DEFAULT_FACTS,
                 boundary: IntegerMatrix | None = None) -> PipelineReport:
    """Compute H_*(Gr(2, C^5) / T) with every intermediate.

    ``certificate`` may be passed to reuse one already computed for the same
    decomposition; ``boundary`` overrides the degree-6 connecting matrix.
    """
    facts = tuple(facts)
    if IOTA3_VANISHES not in facts:
        raise PipelineError(f"missing cited fact {IOTA3_VANISHES.key!r}: "
                            "the degree 3/4 segment is undetermined without it")
    d = ch.dp5_decomposition() if decomposition is None else decomposition
    if certificate is None:
        certificate = contractibility_certificate(d, samples, seed)

    central_pair = polytope_pair_homology(d.central.body)
    if central_pair != DISC_PAIR_4:
        raise PipelineError(f"central chamber is not a homology 4-disc rel boundary: {central_pair}")
    central_point = interior_point(d.central.body)
    fibre = homology_of_model(ch.classify_model(central_point))
    relative = relative_kunneth(fibre, central_pair)

    v0 = v0_model(d.arrangement.base)
    bmat = boundary_matrix(perm) if boundary is None else boundary
    table = solve_pair_sequence(v0.table, relative, _connecting_maps(relative, v0.table, bmat, facts))

    chi = {"V0": v0.table.euler_characteristic(),
           "relative": relative.euler_characteristic(),
           "total": table.euler_characteristic()}
    chi["consistent"] = chi["V0"] + chi["relative"] == chi["total"]

    by_level = ch.levels(d)
    certified: dict[int, int] = {}
    for c in certificate.chambers:
        certified[5 - len(c.complement)] = certified.get(5 - len(c.complement), 0) + 1
    records = [LevelRecord(0, 0, True, v0.table)]
    for k in range(1, 6):
        n = len(by_level[k])
        if k == 5:
            ok, groups = n == 1, relative
        else:
            ok, groups = certified.get(k, 0) == n, HomologyTable()
        records.append(LevelRecord(k, n, ok, groups))

    return PipelineReport(
        table=table, relative=relative, v0=v0, fibre=fibre, central_pair=central_pair,
        boundary=bmat, snf_invariants=invariant_factors(bmat), degree_rule=degree_rule_holds(bmat),
        certificate=certificate, filtration=FiltrationReport(tuple(records)), facts=facts,
        euler=chi)


def compute_orbit_homology(perm: Sequence[int] | None = None, **kwargs) -> HomologyTable:
    return run_pipeline(perm, **kwargs).table
