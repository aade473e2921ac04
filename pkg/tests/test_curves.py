"""Dual graphs of nodal curves: homology lattices and curve equivalences."""

from __future__ import annotations

import random

import pytest

from degenkit.curves import (
    DualGraph,
    GraphEdge,
    GraphVertex,
    curve_equivalences,
    graph_to_datum,
)
from degenkit.degeneration import analyze, toric_rank_profile, validate
from degenkit.errors import InputError
from degenkit.generators import random_graph
from degenkit.monodromy import TraitProfile, component_group, compose_trait


def graph(vertices, edges, n_branches, name="g"):
    return DualGraph(name, 0, n_branches,
                     tuple(GraphVertex(n, g) for n, g in vertices),
                     tuple(GraphEdge(ends, tuple(label)) for ends, label in edges))


TWO_LOOPS = graph([("v0", 0)], [(("v0", "v0"), (1, 0)), (("v0", "v0"), (0, 1))], 2)
SHARED_LOOP = graph([("v0", 0)], [(("v0", "v0"), (1, 1))], 2)
TWO_VERTEX_TREE = graph([("v0", 1), ("v1", 1)], [(("v0", "v1"), (1,))], 1)


class TestGraphToDatum:
    def test_two_loops_is_ta(self):
        datum = graph_to_datum(TWO_LOOPS)
        assert toric_rank_profile(datum) == (2, (1, 1), 0)
        assert analyze(datum).toric_additive

    def test_shared_loop_not_weak(self):
        datum = graph_to_datum(SHARED_LOOP)
        assert toric_rank_profile(datum) == (1, (1, 1), 1)
        assert not analyze(datum).weakly_toric_additive

    def test_tree_with_genus(self):
        datum = graph_to_datum(TWO_VERTEX_TREE)
        assert datum.mu == 0
        assert datum.abelian_rank == 2
        assert analyze(datum).toric_additive

    def test_datums_validate(self):
        rng = random.Random(53)
        for _ in range(40):
            datum = graph_to_datum(random_graph(rng))
            assert validate(datum) == []

    def test_rejects_disconnected(self):
        g = graph([("v0", 0), ("v1", 0)],
                  [(("v0", "v0"), (1,)), (("v1", "v1"), (1,))], 1)
        with pytest.raises(InputError, match="connected"):
            graph_to_datum(g)

    def test_multiplicity_weights_pairing(self):
        g = graph([("v0", 0)], [(("v0", "v0"), (3,))], 1)
        datum = graph_to_datum(g)
        assert datum.branches[0].pairing.entries == ((3,),)

    def test_theta_graph(self):
        # two vertices, three parallel edges: genus-2 dual graph
        g = graph([("v0", 0), ("v1", 0)],
                  [(("v0", "v1"), (1,)), (("v0", "v1"), (1,)), (("v0", "v1"), (1,))], 1)
        datum = graph_to_datum(g)
        assert datum.mu == 2
        pairing = datum.branches[0].pairing
        # intersection form of the theta graph in a fundamental-cycle basis
        assert abs(pairing.determinant()) == 3
        assert component_group(pairing).order == 3


class TestCurveEquivalences:
    def test_two_loops(self):
        report = curve_equivalences(TWO_LOOPS)
        assert report.verdict.toric_additive and report.verdict.weakly_toric_additive
        assert report.torsion_free and report.equivalence_holds
        assert report.falsifications == ()

    def test_shared_loop(self):
        report = curve_equivalences(SHARED_LOOP)
        assert not report.verdict.toric_additive
        assert not report.verdict.weakly_toric_additive
        assert report.verdict.purity_free_rank == 1
        assert report.torsion_free and report.equivalence_holds

    def test_single_branch_random_graphs_ta(self):
        rng = random.Random(59)
        for _ in range(30):
            g = random_graph(rng, max_branches=1)
            report = curve_equivalences(g)
            assert report.verdict.toric_additive
            assert report.falsifications == ()

    def test_randomized_suite(self):
        rng = random.Random(67)
        for _ in range(120):
            report = curve_equivalences(random_graph(rng))
            assert report.torsion_free, report.datum
            assert report.equivalence_holds, report.datum
            assert report.falsifications == ()


class TestSubdivisionInvariance:
    def test_split_multiplicity(self):
        # subdividing a loop of weight 2 into two weight-1 halves keeps phi
        original = graph([("v0", 0)], [(("v0", "v0"), (2,))], 1)
        split = graph([("v0", 0), ("w", 0)],
                      [(("v0", "w"), (1,)), (("w", "v0"), (1,))], 1)
        d1, d2 = graph_to_datum(original), graph_to_datum(split)
        assert d1.branches[0].pairing.entries == d2.branches[0].pairing.entries
        v1, v2 = analyze(d1), analyze(d2)
        assert (v1.toric_additive, v1.weakly_toric_additive) == \
            (v2.toric_additive, v2.weakly_toric_additive)

    def test_split_label_across_branches(self):
        # {1:1, 2:1} loop subdivided into a {1:1} half and a {2:1} half
        original = SHARED_LOOP
        split = graph([("v0", 0), ("w", 0)],
                      [(("v0", "w"), (1, 0)), (("w", "v0"), (0, 1))], 2)
        d1, d2 = graph_to_datum(original), graph_to_datum(split)
        assert toric_rank_profile(d1) == toric_rank_profile(d2)
        for i in range(2):
            assert d1.branches[i].pairing.entries == d2.branches[i].pairing.entries
        v1, v2 = analyze(d1), analyze(d2)
        assert (v1.toric_additive, v1.weakly_toric_additive) == \
            (v2.toric_additive, v2.weakly_toric_additive)


class TestTraitThroughGraph:
    def test_two_loops_composed_pairing(self):
        datum = graph_to_datum(TWO_LOOPS)
        composed = compose_trait(datum, TraitProfile((2, 3)))
        assert component_group(composed.matrix) == component_group(
            compose_trait(datum, TraitProfile((2, 3))).matrix)
        assert abs(composed.matrix.determinant()) == 6
