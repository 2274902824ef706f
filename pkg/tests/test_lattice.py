import itertools
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from grtorus import lattice as lat
from grtorus.lattice import ALL_LABELS, CurveLabel, DivisorClass

import oracles

K = lat.canonical_class()


def test_gram_matrix_is_the_lorentzian_form():
    g = lat.gram_matrix()
    assert g == tuple(tuple(s if i == j else 0 for j, _ in enumerate(lat.SIGNATURE))
                      for i, s in enumerate(lat.SIGNATURE))


def test_canonical_self_intersection_is_the_degree():
    assert K @ K == 5


@pytest.mark.parametrize("label", ALL_LABELS, ids=str)
def test_curves_are_minus_one_curves(label):
    c = lat.curve_class(label)
    assert c @ c == -1
    assert K @ c == -1


def test_curve_class_examples():
    assert lat.curve_class(CurveLabel(1, 5)).coeffs == (1, 0, 0, 0, 0)
    assert lat.curve_class(CurveLabel(3, 4)).coeffs == (-1, -1, 0, 0, 1)
    assert lat.curve_class(CurveLabel(1, 2)).coeffs == (0, 0, -1, -1, 1)


def test_pairing_matches_the_disjointness_rule():
    for a, b in itertools.combinations(ALL_LABELS, 2):
        p = lat.curve_class(a) @ lat.curve_class(b)
        assert p in (0, 1)
        assert (p == 1) == lat.curves_intersect(a, b) == (not (a.pair & b.pair))


def test_curves_intersect_examples():
    assert lat.curves_intersect(CurveLabel(1, 2), CurveLabel(3, 4))
    assert not lat.curves_intersect(CurveLabel(1, 2), CurveLabel(1, 3))
    with pytest.raises(ValueError):
        lat.curves_intersect(CurveLabel(1, 2), CurveLabel(2, 1))


def test_intersection_graph_is_petersen():
    g = lat.intersection_graph()
    assert g.number_of_nodes() == 10 and g.number_of_edges() == 15
    assert all(d == 3 for _, d in g.degree())
    assert nx.girth(g) == 5
    assert nx.is_isomorphic(g, nx.petersen_graph())


def test_independent_sets_match_subset_census():
    sets = lat.independent_sets()
    by_size: dict = {}
    for s in sets:
        by_size[len(s)] = by_size.get(len(s), 0) + 1
    assert by_size == oracles.curve_label_census([l.pair for l in ALL_LABELS])
    assert by_size == {0: 1, 1: 10, 2: 30, 3: 30, 4: 5}
    assert len(set(sets)) == len(sets) == 76


def test_maximal_independent_sets_are_stars():
    fours = {s for s in lat.independent_sets() if len(s) == 4}
    stars = {frozenset(l for l in ALL_LABELS if i in l.pair) for i in lat.INDICES}
    assert fours == stars


def test_contracted_curves_of_a_curve():
    got = lat.contracted_curves(lat.curve_class(CurveLabel(1, 2)))
    assert {str(l) for l in got} == {"C12", "C13", "C14", "C15", "C23", "C24", "C25"}


def test_anticanonical_class_contracts_nothing():
    assert lat.contracted_curves(-K) == frozenset()


def test_label_parsing():
    assert CurveLabel.parse("C35") == CurveLabel(5, 3)
    assert str(CurveLabel(4, 1)) == "C14"
    for bad in ("C11", "C16", "C1", "x"):
        with pytest.raises(ValueError):
            CurveLabel.parse(bad)


def test_label_of_class_inverts_curve_class():
    for l in ALL_LABELS:
        assert lat.label_of_class(lat.curve_class(l).coeffs) == l
    assert lat.label_of_class((0, 0, 0, 0, 1)) is None


@pytest.mark.parametrize("perm", list(itertools.permutations(range(1, 6))), ids=str)
def test_index_permutations_are_lattice_isometries(perm):
    m = lat.index_permutation_matrix(perm)
    for l in ALL_LABELS:
        assert lat.apply_matrix(m, lat.curve_class(l).coeffs) == lat.curve_class(l.permuted(perm)).coeffs
    assert lat.apply_matrix(m, K.coeffs) == K.coeffs
    basis = [DivisorClass.basis(i) for i in lat.INDICES]
    images = [DivisorClass(lat.apply_matrix(m, b.coeffs)) for b in basis]
    assert [[x @ y for y in images] for x in images] == [[x @ y for y in basis] for x in basis]
    assert all(x.denominator == 1 for row in m for x in row)


def test_non_permutation_rejected():
    with pytest.raises(ValueError):
        lat.index_permutation_matrix((1, 1, 2, 3, 4))


def test_petersen_dot_has_fifteen_edges():
    text = lat.petersen_dot()
    assert text.count(" -- ") == 15 and text.startswith("graph")


coeffs = st.tuples(*[st.integers(-5, 5)] * 5).map(DivisorClass)


@given(coeffs, coeffs, coeffs, st.integers(-3, 3))
def test_pairing_is_symmetric_bilinear(a, b, c, k):
    assert a @ b == b @ a
    assert (a + b) @ c == a @ c + b @ c
    assert (k * a) @ b == k * (a @ b)


@given(coeffs)
def test_form_vector_is_the_euclidean_dual(a):
    for i in lat.INDICES:
        e = DivisorClass.basis(i)
        assert sum(x * y for x, y in zip(a.form_vector(), e.coeffs)) == a @ e
    assert isinstance(a @ a, F)
