import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    cc_value_by_edges,
    exhaustive_optimum,
    random_partition,
    random_signed_graph,
    sri_value_by_blocks,
)
from voteclust.core import InvalidPartitionError, Partition, SignedGraph
from voteclust.imbalance import (
    ProblemKind,
    block_totals,
    cc_imbalance,
    cc_move_delta,
    relative_imbalance,
    srcc_imbalance,
    srcc_move_delta,
)


def triangle():
    return SignedGraph(
        ["v1", "v2", "v3"],
        [("v1", "v2", 1.0), ("v1", "v3", 1.0), ("v2", "v3", -1.0)],
    )


def positive_clique(n: int):
    ids = [f"v{i}" for i in range(n)]
    return SignedGraph(ids, [(ids[i], ids[j], 1.0)
                             for i in range(n) for j in range(i + 1, n)])


class TestProblemKind:
    def test_srcc_requires_k(self):
        with pytest.raises(ValueError):
            ProblemKind("srcc")
        with pytest.raises(ValueError):
            ProblemKind.srcc(0)
        assert ProblemKind.srcc(4).k == 4

    def test_cc_takes_no_k(self):
        with pytest.raises(ValueError):
            ProblemKind("cc", 3)
        assert ProblemKind.cc().is_srcc is False


class TestBlockTotals:
    def test_triangle_single_cluster(self):
        blocks = block_totals(triangle(), Partition({"v1": 0, "v2": 0, "v3": 0}, 1))
        assert blocks.pos(0, 0) == 2.0
        assert blocks.neg(0, 0) == 1.0

    def test_triangle_split(self):
        blocks = block_totals(triangle(), Partition({"v1": 0, "v2": 1, "v3": 1}, 2))
        assert blocks.pos(1, 1) == 0.0
        assert blocks.neg(1, 1) == 1.0
        assert blocks.pos(0, 1) == 2.0
        assert blocks.neg(0, 1) == 0.0

    def test_edgeless_graph(self):
        g = SignedGraph(["a", "b"], [])
        blocks = block_totals(g, Partition({"a": 0, "b": 1}, 2))
        assert all(pos == 0 and neg == 0 for _, pos, neg in blocks.blocks())

    def test_block_lookup_is_order_insensitive(self):
        blocks = block_totals(triangle(), Partition({"v1": 0, "v2": 1, "v3": 1}, 2))
        assert blocks.pos(0, 1) == blocks.pos(1, 0)

    def test_invalid_partition_raises(self):
        with pytest.raises(InvalidPartitionError):
            block_totals(triangle(), Partition({"v1": 0, "v2": 0, "v3": 0}, 2))

    def test_conservation_on_random_instances(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            g = random_signed_graph(rng, int(rng.integers(2, 10)))
            k = int(rng.integers(1, g.n + 1))
            p = random_partition(rng, g, k)
            blocks = block_totals(g, p)
            assert blocks.total_abs_weight() == pytest.approx(
                g.total_abs_weight(), abs=1e-9)


class TestCcImbalance:
    def test_triangle_single_cluster_is_global_optimum(self):
        g = triangle()
        assert cc_imbalance(g, Partition({"v1": 0, "v2": 0, "v3": 0}, 1)) == 1.0
        best, _ = exhaustive_optimum(g, cc_imbalance)
        assert best == 1.0

    def test_positive_clique_single_cluster(self):
        g = positive_clique(4)
        assert cc_imbalance(g, Partition({v: 0 for v in g.vertex_ids}, 1)) == 0.0

    def test_positive_clique_split_counts_crossing_edges(self):
        g = positive_clique(4)
        split = Partition({"v0": 0, "v1": 0, "v2": 1, "v3": 1}, 2)
        assert cc_imbalance(g, split) == cc_value_by_edges(g, split) == 4.0
        best, _ = exhaustive_optimum(g, cc_imbalance)
        assert best == 0.0

    def test_agrees_with_edge_sum_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            g = random_signed_graph(rng, int(rng.integers(2, 11)))
            p = random_partition(rng, g, int(rng.integers(1, g.n + 1)))
            assert cc_imbalance(g, p) == pytest.approx(cc_value_by_edges(g, p), abs=1e-12)


class TestSrccImbalance:
    def test_triangle_split_is_relaxed_balanced(self):
        g = triangle()
        b = srcc_imbalance(g, Partition({"v1": 0, "v2": 1, "v3": 1}, 2))
        assert b.total == 0.0
        # the same graph costs 1.0 under the unrelaxed objective at its optimum
        best_cc, _ = exhaustive_optimum(g, cc_imbalance)
        assert best_cc == 1.0

    def test_all_positive_any_partition_is_free(self):
        g = positive_clique(5)
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = random_partition(rng, g, int(rng.integers(1, 6)))
            assert srcc_imbalance(g, p).total == 0.0

    def test_single_negative_edge_intra_is_legitimate(self):
        g = SignedGraph(["u", "v"], [("u", "v", -1.0)])
        b = srcc_imbalance(g, Partition({"u": 0, "v": 0}, 1))
        assert b.total == 0.0
        assert b.block_signs[(0, 0)] == "NEGATIVE"

    def test_mixed_intra_block_counts_minority(self):
        g = SignedGraph(["a", "b", "c"], [("a", "b", 1.0), ("a", "c", -0.4)])
        b = srcc_imbalance(g, Partition({"a": 0, "b": 0, "c": 0}, 1))
        assert b.total == pytest.approx(0.4)
        assert b.block_signs[(0, 0)] == "POSITIVE"

    def test_sign_tie_reports_positive(self):
        g = SignedGraph(["a", "b", "c"], [("a", "b", 0.5), ("a", "c", -0.5)])
        b = srcc_imbalance(g, Partition({"a": 0, "b": 0, "c": 0}, 1))
        assert b.block_signs[(0, 0)] == "POSITIVE"

    def test_agrees_with_block_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            g = random_signed_graph(rng, int(rng.integers(2, 11)))
            p = random_partition(rng, g, int(rng.integers(1, g.n + 1)))
            assert srcc_imbalance(g, p).total == pytest.approx(
                sri_value_by_blocks(g, p), abs=1e-12)

    def test_breakdown_total_matches_blocks(self):
        g = triangle()
        b = srcc_imbalance(g, Partition({"v1": 0, "v2": 0, "v3": 1}, 2))
        recomputed = math.fsum(min(pos, neg) for _, pos, neg in b.blocks.blocks())
        assert b.total == pytest.approx(recomputed, abs=1e-9)


class TestRelativeImbalance:
    def test_all_positive_is_zero_percent(self):
        g = positive_clique(4)
        b = srcc_imbalance(g, Partition({v: 0 for v in g.vertex_ids}, 1))
        assert relative_imbalance(g, b) == 0.0

    def test_scaling_example(self):
        # total |weight| 10, minority 0.04 -> 0.4%
        ids = [f"v{i}" for i in range(11)]
        edges = [(ids[0], ids[i], 1.0) for i in range(1, 10)]
        edges.append((ids[0], ids[10], 0.96))
        edges.append((ids[1], ids[10], -0.04))
        g = SignedGraph(ids, edges)
        b = srcc_imbalance(g, Partition({v: 0 for v in ids}, 1))
        assert g.total_abs_weight() == pytest.approx(10.0)
        assert b.total == pytest.approx(0.04)
        assert relative_imbalance(g, b) == pytest.approx(0.4)

    def test_single_negative_edge_intra(self):
        g = SignedGraph(["u", "v"], [("u", "v", -1.0)])
        b = srcc_imbalance(g, Partition({"u": 0, "v": 0}, 1))
        assert relative_imbalance(g, b) == 0.0

    def test_edgeless_graph_rejected(self):
        g = SignedGraph(["u", "v"], [])
        b = srcc_imbalance(g, Partition({"u": 0, "v": 1}, 2))
        with pytest.raises(ValueError):
            relative_imbalance(g, b)


class TestMoveDeltas:
    def test_cc_delta_examples_from_full_reevaluation(self):
        # The independent oracle is: evaluate before and after explicitly.
        g = triangle()
        single = Partition({"v1": 0, "v2": 0, "v3": 0}, 1)
        blocks = block_totals(g, single)
        before = cc_value_by_edges(g, single)
        # v3 (edges +1 to v1, -1 to v2) to a new singleton
        after_v3 = cc_value_by_edges(g, Partition({"v1": 0, "v2": 0, "v3": 1}, 2))
        assert after_v3 - before == 0.0
        assert cc_move_delta(g, single, blocks, "v3", 1) == pytest.approx(0.0)
        # v1 (edges +1, +1) to a new singleton: both positives start crossing
        after_v1 = cc_value_by_edges(g, Partition({"v1": 1, "v2": 0, "v3": 0}, 2))
        assert after_v1 - before == 2.0
        assert cc_move_delta(g, single, blocks, "v1", 1) == pytest.approx(2.0)

    def test_cc_all_positive_leaving_the_clique_costs(self):
        g = positive_clique(4)
        p = Partition({v: 0 for v in g.vertex_ids}, 1)
        blocks = block_totals(g, p)
        for v in g.vertex_ids:
            assert cc_move_delta(g, p, blocks, v, 1) > 0.0

    def test_cc_isolated_vertex_moves_for_free(self):
        g = SignedGraph(["a", "b", "c"], [("a", "b", 1.0)])
        p = Partition({"a": 0, "b": 0, "c": 0}, 1)
        assert cc_move_delta(g, p, block_totals(g, p), "c", 1) == 0.0

    def test_cc_sole_member_to_new_singleton_rejected(self):
        g = triangle()
        p = Partition({"v1": 0, "v2": 0, "v3": 1}, 2)
        with pytest.raises(ValueError):
            cc_move_delta(g, p, block_totals(g, p), "v3", 2)

    def test_srcc_delta_spec_example(self):
        g = triangle()
        p = Partition({"v1": 0, "v2": 0, "v3": 1}, 2)
        blocks = block_totals(g, p)
        before = srcc_imbalance(g, p).total
        after = srcc_imbalance(g, Partition({"v1": 0, "v2": 1, "v3": 1}, 2)).total
        assert before == 1.0 and after == 0.0
        assert srcc_move_delta(g, p, blocks, "v2", 1) == pytest.approx(-1.0)

    def test_srcc_all_positive_moves_are_free(self):
        g = positive_clique(5)
        p = Partition(dict(zip(g.vertex_ids, [0, 0, 1, 1, 1])), 2)
        blocks = block_totals(g, p)
        assert srcc_move_delta(g, p, blocks, "v0", 1) == pytest.approx(0.0)

    def test_srcc_emptying_source_rejected(self):
        g = triangle()
        p = Partition({"v1": 0, "v2": 0, "v3": 1}, 2)
        with pytest.raises(ValueError):
            srcc_move_delta(g, p, block_totals(g, p), "v3", 0)

    def test_srcc_isolated_vertex_moves_for_free(self):
        g = SignedGraph(["a", "b", "c", "d"], [("a", "b", -0.5)])
        p = Partition({"a": 0, "b": 0, "c": 1, "d": 1}, 2)
        assert srcc_move_delta(g, p, block_totals(g, p), "c", 0) == 0.0

    @pytest.mark.parametrize("problem", ["cc", "srcc"])
    def test_delta_matches_full_recomputation(self, problem):
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 400:
            g = random_signed_graph(rng, int(rng.integers(3, 11)))
            k = int(rng.integers(2, g.n))
            p = random_partition(rng, g, k)
            sizes = p.cluster_sizes()
            blocks = block_totals(g, p)
            v = g.vertex_ids[int(rng.integers(g.n))]
            source = p.assignment[v]
            if problem == "cc":
                target = int(rng.integers(k + 1))
                if target == source or (target == k and sizes[source] == 1):
                    continue
                new_k = k + 1 if target == k else k
                moved = dict(p.assignment)
                moved[v] = target
                after = Partition(moved, new_k)
                delta = cc_move_delta(g, p, blocks, v, target)
                full = cc_value_by_edges(g, after) - cc_value_by_edges(g, p)
            else:
                target = int(rng.integers(k))
                if target == source or sizes[source] == 1:
                    continue
                moved = dict(p.assignment)
                moved[v] = target
                after = Partition(moved, k)
                delta = srcc_move_delta(g, p, blocks, v, target)
                full = sri_value_by_blocks(g, after) - sri_value_by_blocks(g, p)
            assert delta == pytest.approx(full, abs=1e-9)
            checked += 1


class TestObjectiveProperties:
    def test_dominance_and_bounds(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            g = random_signed_graph(rng, int(rng.integers(2, 11)))
            p = random_partition(rng, g, int(rng.integers(1, g.n + 1)))
            sri = srcc_imbalance(g, p).total
            cc = cc_imbalance(g, p)
            total = g.total_abs_weight()
            assert 0.0 <= sri <= cc <= total + 1e-12

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            g = random_signed_graph(rng, int(rng.integers(3, 10)))
            k = int(rng.integers(2, g.n + 1))
            p = random_partition(rng, g, k)
            perm = list(rng.permutation(k))
            q = p.relabeled({i: int(perm[i]) for i in range(k)})
            assert cc_imbalance(g, p) == pytest.approx(cc_imbalance(g, q), abs=1e-12)
            assert srcc_imbalance(g, p).total == pytest.approx(
                srcc_imbalance(g, q).total, abs=1e-12)

    @pytest.mark.parametrize("factor", [0.5, 0.25])
    def test_weight_scaling_scales_objectives(self, factor):
        rng = np.random.default_rng(31)
        for _ in range(10):
            g = random_signed_graph(rng, 7)
            scaled = SignedGraph(
                g.vertex_ids,
                [(g.vertex_ids[u], g.vertex_ids[v], w * factor) for u, v, w in g.edges],
            )
            p = random_partition(rng, g, 3)
            assert cc_imbalance(scaled, p) == pytest.approx(
                factor * cc_imbalance(g, p), abs=1e-12)
            assert srcc_imbalance(scaled, p).total == pytest.approx(
                factor * srcc_imbalance(g, p).total, abs=1e-12)
            # the optimizer set is unchanged on enumerable instances
            base_best, base_labels = exhaustive_optimum(g, cc_imbalance)
            scaled_best, scaled_labels = exhaustive_optimum(scaled, cc_imbalance)
            assert scaled_best == pytest.approx(factor * base_best, abs=1e-12)
            assert base_labels == scaled_labels

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_all_positive_graphs_have_zero_relaxed_imbalance(self, seed):
        rng = np.random.default_rng(seed)
        g = random_signed_graph(rng, int(rng.integers(2, 9)), weights=(0.5, 1.0))
        p = random_partition(rng, g, int(rng.integers(1, g.n + 1)))
        assert srcc_imbalance(g, p).total == 0.0
