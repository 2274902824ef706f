import itertools
import json
from fractions import Fraction as F

import jsonschema
import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from grtorus import chambers as ch
from grtorus import lattice as lat
from grtorus import polytope as pt
from grtorus.lattice import ALL_LABELS, CurveLabel
from grtorus.polytope import AffineHalfspace, VPolytope

import oracles

SQUARE = VPolytope(((0, 0), (0, 2), (2, 0), (2, 2)), 2)


def square_arrangement(*walls):
    return ch.DirectedArrangement(SQUARE, tuple((f"w{k}", AffineHalfspace(n, b))
                                                for k, (n, b) in enumerate(walls)))


# -- the del Pezzo arrangement ------------------------------------------------------

def test_facet_names_are_stars_and_avoiders():
    a = ch.dp5_arrangement()
    for k, f in enumerate(a.base.facets):
        labels = {lat.label_of_class(a.base.vertices[i]) for i in f.vertices}
        name = a.facet_name(k)
        i = int(name[1:])
        if name[0] == "T":
            assert labels == {l for l in ALL_LABELS if i in l.pair}
        else:
            assert labels == {l for l in ALL_LABELS if i not in l.pair}
    assert sorted(a.base_facet_names) == [f"{c}{i}" for c in "OT" for i in range(1, 6)]


def test_census_and_levels(dp5):
    assert len(dp5) == 76
    assert {k: len(v) for k, v in ch.levels(dp5).items()} == {5: 1, 4: 10, 3: 30, 2: 30, 1: 5}


def test_complements_are_exactly_the_independent_sets(dp5):
    assert dp5.complements() == set(lat.independent_sets())


@pytest.mark.parametrize("method", ["split", "brute_force"])
def test_enumeration_methods_agree(dp5, method):
    other = ch.dp5_decomposition(method)
    assert other.complements() == dp5.complements()
    assert [c.body for c in other.chambers] == [c.body for c in dp5.chambers]


def test_central_chamber(dp5):
    c = dp5.central
    assert c.complement == frozenset() and len(c.body.vertices) == 10
    assert c.body.contains(pt.interior_point(pt.cross_section_P()))
    assert len(c.positive_facets) == len(c.facets)


def test_volumes_add_up(dp5):
    base = dp5.arrangement.base
    coords = (0, 1, 2, 3)
    assert sum(pt.volume(c.body, coords) for c in dp5.chambers) == pt.volume(base, coords)


@pytest.mark.parametrize("index", [0, 1, 11, 40, 75])
def test_chamber_facets_match_exhaustive_search(dp5, index):
    body = dp5.chambers[index].body
    assert {f.vertices for f in body.facets} == oracles.facets_by_search(body.vertices)


def test_noncentral_chambers_have_positive_boundary(dp5):
    for c in dp5.chambers:
        if c is not dp5.central:
            assert c.positive_facets
            assert len(ch.positive_boundary(c)) == len(c.positive_facets)


def test_positive_intersection_lemma(dp5):
    r = ch.check_positive_intersection(dp5)
    assert r.passed and not r.failures
    assert r.checked_pairs > 0


def test_retraction_lands_on_positive_boundary(dp5):
    origin = ch.default_origin(dp5)
    assert ch.origin_is_admissible(dp5, origin)
    for k, c in enumerate(dp5.chambers):
        if c is dp5.central:
            continue
        for v in list(c.body.vertices) + ch.sample_points(c, 20, seed=k):
            u = ch.retract(c, v, origin, dp5)
            assert c.on_positive_boundary(u)
            assert ch.retract(c, u, origin) == u


def test_retraction_rejections(dp5):
    origin = ch.default_origin(dp5)
    with pytest.raises(ch.RetractionError):
        ch.retract(dp5.central, origin, origin, dp5)
    c = dp5.chambers[1]
    with pytest.raises(ch.RetractionError):
        ch.retract(c, origin, origin)  # not in the chamber
    with pytest.raises(ch.RetractionError):
        ch.retract(c, c.body.vertices[0], c.body.vertices[-1], dp5)  # origin not admissible


def test_sample_points_are_interior_and_seeded(dp5):
    c = dp5.chambers[5]
    pts = ch.sample_points(c, 30, seed=3)
    assert pts == ch.sample_points(c, 30, seed=3)
    assert all(c.body.contains(p) for p in pts)
    assert not any(f.halfspace.on_boundary(p) for p in pts for f in c.facets)


@pytest.mark.parametrize("perm", list(itertools.permutations(range(1, 6))), ids=str)
def test_index_permutations_permute_chambers(dp5, perm):
    m = lat.index_permutation_matrix(perm)
    for c in dp5.chambers:
        image = dp5.by_complement(l.permuted(perm) for l in c.complement)
        assert image is not None
        assert {lat.apply_matrix(m, v) for v in c.body.vertices} == set(image.body.vertices)


def test_hypersimplex_arrangement_is_isomorphic(dp5):
    hyper = ch.enumerate_chambers(ch.hypersimplex_arrangement())
    assert len(hyper) == 76
    assert {k: len(v) for k, v in ch.levels(hyper).items()} == {5: 1, 4: 10, 3: 30, 2: 30, 1: 5}
    to_hyper = ch.dp5_to_hypersimplex_map()
    for c in dp5.chambers:
        h = hyper.by_complement(c.complement)
        assert {to_hyper(v) for v in c.body.vertices} == set(h.body.vertices)


def test_hypersimplex_map_sends_curves_to_vertices():
    to_hyper = ch.dp5_to_hypersimplex_map()
    for l in ALL_LABELS:
        assert to_hyper(lat.curve_class(l).coeffs) == tuple(int(k in l.pair) for k in lat.INDICES)


# -- models ----------------------------------------------------------------------------

def test_models_of_chamber_interiors(dp5):
    for c in dp5.chambers:
        m = ch.classify_model(pt.interior_point(c.body))
        assert isinstance(m, ch.SurfaceBlowdown) and m.contracted == c.complement


def test_model_surfaces():
    assert ch.classify_model(-lat.canonical_class()).surface == "dP5"
    star = frozenset(l for l in ALL_LABELS if 1 in l.pair)
    assert ch.SurfaceBlowdown(star).surface == "CP2"
    triangle = frozenset(CurveLabel.parse(s) for s in ("C12", "C13", "C23"))
    assert ch.SurfaceBlowdown(triangle).surface == "CP1xCP1"
    assert ch.SurfaceBlowdown(frozenset(list(star)[:3])).surface == "Bl1CP2"
    with pytest.raises(ValueError):
        ch.SurfaceBlowdown(frozenset({CurveLabel(1, 2), CurveLabel(3, 4)}))


def test_models_on_the_boundary():
    p = pt.cross_section_P()
    a = ch.dp5_arrangement()
    for k, f in enumerate(p.facets):
        point = pt.interior_point(VPolytope(tuple(p.vertices[i] for i in f.vertices), 5))
        m = ch.classify_model(point)
        if a.facet_name(k).startswith("O"):
            assert m == ch.ConicBundle(int(a.facet_name(k)[1:]))
        else:
            assert m == ch.PointModel()
    for v in p.vertices:
        assert ch.classify_model(v) == ch.PointModel()
    # the pulled-back line class contracts the four exceptional divisors
    assert ch.classify_model((0, 0, 0, 0, 1)).surface == "CP2"
    with pytest.raises(ValueError):
        ch.classify_model((0, 0, 0, 0, -1))


# -- small arrangements -------------------------------------------------------------------

def test_square_with_one_wall():
    a = square_arrangement(((1, 0), 1))
    d = ch.enumerate_chambers(a)
    assert len(d) == 2 and d.central is not None
    assert ch.check_positive_intersection(d).passed


def test_square_with_crossing_walls():
    a = square_arrangement(((1, 0), 1), ((0, 1), 1))
    d = ch.enumerate_chambers(a)
    assert len(d) == 4
    assert d.complements() == ch.brute_force_chambers(a).complements()


def test_wall_missing_the_base_is_reported():
    a = square_arrangement(((1, 0), 1), ((1, 1), 10))
    d = ch.enumerate_chambers(a)
    assert d.missed_walls == ("w1",) and len(d) == 2


def test_duplicate_walls_rejected():
    with pytest.raises(ch.ArrangementError):
        square_arrangement(((1, 0), 1), ((2, 0), 2))


def test_wall_constant_on_the_hull_rejected():
    base = pt.standard_hypersimplex()
    with pytest.raises(ch.ArrangementError):
        ch.DirectedArrangement(base, (("w", AffineHalfspace((1,) * 5, 1)),))


walls2 = st.lists(st.tuples(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
                            st.integers(-4, 4)), min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(walls2)
def test_random_square_arrangements(walls):
    walls = [(n, b) for n, b in walls if any(n)]
    try:
        a = square_arrangement(*walls)
    except ch.ArrangementError:
        return
    d = ch.enumerate_chambers(a)
    assert d.complements() == ch.brute_force_chambers(a).complements()
    assert sum(pt.volume(c.body) for c in d.chambers) == 4


# -- exports ----------------------------------------------------------------------------------

def test_adjacency_graph(dp5):
    text = ch.adjacency_dot(dp5)
    nodes = [l for l in text.splitlines() if l.strip().endswith(";") and "--" not in l]
    assert len(nodes) == 76
    g = nx.Graph(ch.adjacency(dp5))
    assert g.number_of_nodes() == 76 and nx.is_connected(g)


def test_chamber_records(dp5):
    recs = ch.chamber_records(dp5)
    assert recs[0]["J_complement"] == [] and recs[0]["level"] == 5
    assert {r["level"] for r in recs} == {1, 2, 3, 4, 5}
    json.dumps(recs)


def test_arrangement_json_round_trip(dp5):
    data = json.loads(json.dumps(ch.arrangement_to_json(dp5.arrangement)))
    a = ch.arrangement_from_json(data)
    d = ch.enumerate_chambers(a)
    assert ch.chamber_records(d) == ch.chamber_records(dp5)


@pytest.mark.parametrize("data", [
    {"walls": []},
    {"base": {"vertices": [[0.5, 1]]}, "walls": []},
    {"base": {"vertices": [[0, 0], [1, 1]]}, "walls": [{"label": "a"}]},
    {"base": {"ambient_dim": 1, "inequalities": [["1", "0"]]}, "walls": [], "extra": 1},
])
def test_schema_violations(data):
    with pytest.raises(jsonschema.ValidationError):
        ch.arrangement_from_json(data)


def test_unbounded_base_rejected():
    data = {"base": {"ambient_dim": 1, "inequalities": [["1", "0"]]}, "walls": []}
    with pytest.raises(pt.UnboundedError):
        ch.arrangement_from_json(data)


def test_rational_strings_accepted():
    data = {"base": {"vertices": [["0"], ["3/2"]]}, "walls": [{"label": "h", "row": ["1", "1/2"]}]}
    d = ch.enumerate_chambers(ch.arrangement_from_json(data))
    assert [c.body.vertices for c in d.chambers] == [((F(1, 2),), (F(3, 2),)), ((0,), (F(1, 2),))]
