import dataclasses
import itertools
import json

import numpy as np
import pytest

from grtorus import chambers as ch
from grtorus import pipeline as pl
from grtorus import polytope as pt
from grtorus.homology import Z, FGAbelianGroup, GroupHom, HomologyTable, IntegerMatrix, cokernel
from grtorus.lattice import ALL_LABELS

import oracles

Z2 = FGAbelianGroup(0, (2,))


def table(**kw):
    return HomologyTable({int(k[1:]): v for k, v in kw.items()})


# -- fibres and relative groups ---------------------------------------------------------

def test_homology_of_models():
    assert pl.homology_of_model(ch.SurfaceBlowdown(frozenset())) == table(h0=Z, h2=FGAbelianGroup.free(5), h4=Z)
    assert pl.homology_of_model(ch.PointModel()) == table(h0=Z)
    assert pl.homology_of_model(ch.ConicBundle(1)) == table(h0=Z, h2=Z)
    quadric = frozenset(l for l in ALL_LABELS if l.pair <= {1, 2, 3})
    assert pl.homology_of_model(ch.SurfaceBlowdown(quadric)) == table(h0=Z, h2=FGAbelianGroup.free(2), h4=Z)
    star = frozenset(l for l in ALL_LABELS if 5 in l.pair)
    assert pl.homology_of_model(ch.SurfaceBlowdown(star)) == table(h0=Z, h2=Z, h4=Z)


def test_each_contraction_lowers_the_euler_characteristic_by_one(dp5):
    for c in dp5.chambers:
        m = ch.SurfaceBlowdown(c.complement)
        assert pl.homology_of_model(m).euler_characteristic() == 7 - len(c.complement)


def test_relative_kunneth_examples():
    dp5 = table(h0=Z, h2=FGAbelianGroup.free(5), h4=Z)
    assert pl.relative_kunneth(dp5) == table(h4=Z, h6=FGAbelianGroup.free(5), h8=Z)
    assert pl.relative_kunneth(table(h0=Z)) == table(h4=Z)
    assert pl.relative_kunneth(table(h0=Z, h2=Z)) == table(h4=Z, h6=Z)


def test_pair_homology_of_simplices_and_cubes():
    tri = pt.VPolytope(((0, 0), (1, 0), (0, 1)), 2)
    assert pl.polytope_pair_homology(tri) == table(h2=Z)
    cube = pt.VPolytope(tuple(itertools.product((0, 1), repeat=3)), 3)
    assert pl.polytope_pair_homology(cube) == table(h3=Z)


def test_central_chamber_is_a_disc_rel_boundary(dp5):
    assert pl.polytope_pair_homology(dp5.central.body) == pl.DISC_PAIR_4


def test_relative_simplicial_homology_of_an_annulus():
    outer, inner = [0, 1, 2, 3], [4, 5, 6, 7]
    tris = []
    for k in range(4):
        a, b = outer[k], outer[(k + 1) % 4]
        c, d = inner[k], inner[(k + 1) % 4]
        tris += [(a, b, c), (b, c, d)]
    ring = lambda vs: [(vs[k], vs[(k + 1) % 4]) for k in range(4)]  # noqa: E731
    # a collar on one circle carries no relative homology
    assert pl.relative_simplicial_homology(tris, ring(outer)) == table()
    # rel the whole boundary, duality gives the cohomology of the annulus
    assert pl.relative_simplicial_homology(tris, ring(outer) + ring(inner)) == table(h1=Z, h2=Z)


# -- V_0 -----------------------------------------------------------------------------------

def test_v0_model():
    v0 = pl.v0_model()
    assert v0.boundary_sphere == pl.SPHERE_3
    assert v0.cells == 5
    assert v0.table == table(h0=Z, h3=Z, h5=FGAbelianGroup.free(5))
    assert pl.v0_homology() == v0.table


def test_boundary_of_hypersimplex_is_a_sphere():
    assert pl.v0_model(pt.standard_hypersimplex()).boundary_sphere == pl.SPHERE_3


def test_pair_sequence_refuses_unknown_maps():
    with pytest.raises(pl.UnsupportedSequenceError):
        pl.solve_pair_sequence(table(h3=Z), table(h4=Z))
    with pytest.raises(pl.UnsupportedSequenceError):
        pl.solve_pair_sequence(table(h3=Z), table(h4=Z), {4: GroupHom(Z, FGAbelianGroup.free(2),
                                                                     IntegerMatrix.zeros(2, 1))})


def test_pair_sequence_of_disc_and_sphere():
    # (D^3, S^2): H(S^2) and relative Z@3 with connecting map iso give H(D^3) = Z@0
    got = pl.solve_pair_sequence(table(h0=Z, h2=Z), table(h3=Z),
                                 {3: GroupHom(Z, Z, IntegerMatrix.identity(1))})
    assert got == table(h0=Z)


# -- the degree matrix -------------------------------------------------------------------------

def test_boundary_matrix_rows():
    m = pl.boundary_matrix()
    assert m.shape == (10, 5)
    assert m.entries[0] == (1, 1, 0, 0, 0)
    assert all(sum(r) == 2 for r in m.entries)
    assert all(sum(m[r, c] for r in range(10)) == 4 for c in range(5))
    assert pl.degree_rule_holds(m)
    assert [str(g) for g in pl.RELATIVE_CLASSES][:2] == ["D12", "D13"]


def test_boundary_matrix_algebra():
    m = pl.boundary_matrix()
    assert cokernel(m.T) == Z2
    assert pl.invariant_factors(m) == oracles.minor_gcd_invariants([list(r) for r in m.entries])
    assert m.rank() == 5


@pytest.mark.parametrize("perm", list(itertools.permutations(range(1, 6)))[::7], ids=str)
def test_boundary_matrix_permutes_rows(perm):
    m = pl.boundary_matrix(perm)
    assert sorted(m.entries) == sorted(pl.boundary_matrix().entries)
    assert cokernel(m.T) == Z2


def test_boundary_matrix_rejects_non_permutations():
    with pytest.raises(ValueError):
        pl.boundary_matrix((1, 2, 3, 4, 4))


# -- certificate ------------------------------------------------------------------------------

def test_certificate_covers_every_noncentral_chamber(certificate):
    assert certificate.passed
    assert len(certificate.chambers) == 75
    assert all(c.points_checked > c.positive_facets > 0 for c in certificate.chambers)


def test_certificate_refuses_without_central_chamber(dp5):
    broken = ch.Decomposition(dp5.arrangement, dp5.chambers[1:])
    with pytest.raises(pl.CertificateError, match="central"):
        pl.contractibility_certificate(broken)


def test_certificate_catches_corrupted_positive_facets(dp5):
    victim = dp5.chambers[3]
    bad = dataclasses.replace(victim, positive_facets=victim.positive_facets[:-1])
    chambers = tuple(bad if c is victim else c for c in dp5.chambers)
    with pytest.raises(pl.CertificateError) as err:
        pl.contractibility_certificate(ch.Decomposition(dp5.arrangement, chambers))
    assert err.value.witness == tuple(str(l) for l in sorted(victim.complement, key=dp5.arrangement.index))


# -- assembly ----------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def report(certificate):
    return pl.run_pipeline(certificate=certificate)


def test_orbit_homology(report):
    assert report.table == table(h0=Z, h5=Z2, h8=Z)
    assert report.ok and report.matches_expected


def test_intermediates(report):
    assert report.relative == table(h4=Z, h6=FGAbelianGroup.free(5), h8=Z)
    assert report.v0.table == table(h0=Z, h3=Z, h5=FGAbelianGroup.free(5))
    assert report.fibre == table(h0=Z, h2=FGAbelianGroup.free(5), h4=Z)
    assert report.snf_invariants == (1, 1, 1, 1, 2)


def test_euler_bookkeeping(report):
    assert report.euler == {"V0": -5, "relative": 7, "total": 2, "consistent": True}


def test_filtration_levels(report, dp5):
    assert report.filtration.counts() == {k: len(v) for k, v in ch.levels(dp5).items()}
    assert all(r.certified for r in report.filtration.levels)
    assert report.filtration.levels[5].groups == report.relative


def test_report_json_is_deterministic(report, certificate):
    again = pl.run_pipeline(certificate=certificate)
    assert report.dumps() == again.dumps()
    data = json.loads(report.dumps())
    assert data["homology"] == {"0": "Z", "5": "Z/2", "8": "Z"}
    assert data["snf_invariants"] == [1, 1, 1, 1, 2]
    assert data["cited_facts"][0]["key"] == "iota3_zero"


def test_pipeline_refuses_without_the_cited_fact(certificate):
    with pytest.raises(pl.PipelineError, match="iota3_zero"):
        pl.run_pipeline(certificate=certificate, facts=())


def test_corrupted_boundary_is_flagged(certificate):
    rows = [list(r) for r in pl.boundary_matrix().entries]
    rows[0][0] = 2
    r = pl.run_pipeline(certificate=certificate, boundary=IntegerMatrix.from_rows(rows, 5))
    assert not r.degree_rule and not r.ok


def test_compute_orbit_homology_runs_end_to_end():
    assert pl.compute_orbit_homology() == pl.EXPECTED_ORBIT_HOMOLOGY


# -- disc model ----------------------------------------------------------------------------------

def test_disc_model_examples():
    out = pl.disc_model([0.6, 0.8], [1.0, 0.0])
    np.testing.assert_allclose(out, [0.6, 0.0, 0.0], atol=1e-15)
    out = pl.disc_model([0.0, 0.0], [0.0, 1.0])
    np.testing.assert_allclose(out, [0.0, 0.0, 1.0])
    assert abs(np.linalg.norm(out) - 1) < 1e-15


def test_disc_model_preconditions():
    for u, y in [([0.5, -0.1], [1, 0]), ([1.0, 1.0], [1, 0]), ([0.1, 0.1], [0.5, 0])]:
        with pytest.raises(ValueError):
            pl.disc_model(u, y)


def test_disc_model_sampled():
    rng = np.random.default_rng(11)
    for k in range(10_000):
        u = rng.normal(size=3)
        u /= max(1.0, np.linalg.norm(u)) * rng.uniform(1.0, 2.0)
        u[-1] = abs(u[-1]) if k % 4 else 0.0
        y = rng.normal(size=2)
        y /= np.linalg.norm(y)
        out = pl.disc_model(u, y)
        n2 = float(out @ out)
        assert n2 <= 1 + 1e-12
        assert abs(n2 - (1 - u[-1] ** 2)) < 1e-12
        assert (abs(n2 - 1) < 1e-12) == (u[-1] == 0.0 or u[-1] ** 2 < 1e-12)
