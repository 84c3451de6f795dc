import numpy as np
import pytest

from helpers import random_partition, random_signed_graph
from voteclust.analysis import (
    CoalitionMap,
    LeaderMap,
    cluster_composition,
    coalition_loyalty,
    detect_mediation,
    leadership_strength,
    polarization_summary,
)
from voteclust.core import DataError, Deputy, Partition, SignedGraph


def deputy(i: int, party: str) -> Deputy:
    return Deputy(f"d{i}", f"Deputy {i}", party, "RJ")


class TestDetectMediation:
    def test_all_positive_cluster_is_a_mediator(self):
        g = SignedGraph(["a", "b", "c", "d"],
                        [("a", "b", 1.0), ("c", "d", 1.0), ("b", "c", 0.8)])
        p = Partition({"a": 0, "b": 0, "c": 1, "d": 1}, 2)
        verdicts = detect_mediation(g, p)
        assert all(v.is_mediator for v in verdicts)
        assert all(v.internal_positive_ratio == 1.0 for v in verdicts)

    def test_half_positive_external_is_not_a_mediator(self):
        # cluster 0: intra (+1, +1), external (+1, -1) -> external ratio 0.5
        g = SignedGraph(
            ["a", "b", "c", "x", "y"],
            [("a", "b", 1.0), ("a", "c", 1.0),
             ("b", "x", 1.0), ("c", "y", -1.0), ("x", "y", 0.5)],
        )
        p = Partition({"a": 0, "b": 0, "c": 0, "x": 1, "y": 1}, 2)
        v0 = detect_mediation(g, p)[0]
        assert v0.internal_positive_ratio == 1.0
        assert v0.external_positive_ratio == 0.5
        assert not v0.is_mediator

    def test_singleton_cluster_with_positive_tie(self):
        g = SignedGraph(["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0)])
        p = Partition({"a": 0, "b": 1, "c": 1}, 2)
        v0 = detect_mediation(g, p)[0]
        assert v0.internal_positive_ratio == 1.0  # vacuous: no intra edges
        assert v0.external_positive_ratio == 1.0
        assert v0.is_mediator

    def test_threshold_is_strict(self):
        # external exactly at the threshold must not flag
        g = SignedGraph(["a", "b", "x"], [("a", "b", 1.0), ("a", "x", 0.9), ("b", "x", -0.1)])
        p = Partition({"a": 0, "b": 0, "x": 1}, 2)
        v0 = detect_mediation(g, p, threshold=0.9)[0]
        assert v0.external_positive_ratio == pytest.approx(0.9)
        assert not v0.is_mediator

    def test_count_based_ratios(self):
        g = SignedGraph(["a", "b", "x"], [("a", "b", 1.0), ("a", "x", 0.9), ("b", "x", -0.1)])
        p = Partition({"a": 0, "b": 0, "x": 1}, 2)
        v0 = detect_mediation(g, p, weight_based=False)[0]
        assert v0.external_positive_ratio == pytest.approx(0.5)

    def test_invariant_under_relabeling_and_scaling(self):
        rng = np.random.default_rng(3)
        g = random_signed_graph(rng, 9)
        p = random_partition(rng, g, 3)
        base = detect_mediation(g, p)
        perm = {0: 2, 1: 0, 2: 1}
        relabeled = detect_mediation(g, p.relabeled(perm))
        for v in base:
            twin = next(w for w in relabeled if w.cluster == perm[v.cluster])
            assert twin.internal_positive_ratio == pytest.approx(v.internal_positive_ratio)
            assert twin.external_positive_ratio == pytest.approx(v.external_positive_ratio)
            assert twin.is_mediator == v.is_mediator
        scaled = SignedGraph(
            g.vertex_ids,
            [(g.vertex_ids[u], g.vertex_ids[v], w * 0.5) for u, v, w in g.edges],
        )
        for v, w in zip(base, detect_mediation(scaled, p)):
            assert w.internal_positive_ratio == pytest.approx(v.internal_positive_ratio)
            assert w.external_positive_ratio == pytest.approx(v.external_positive_ratio)

    def test_bad_threshold_rejected(self):
        g = SignedGraph(["a", "b"], [("a", "b", 1.0)])
        p = Partition({"a": 0, "b": 0}, 1)
        with pytest.raises(ValueError):
            detect_mediation(g, p, threshold=1.0)


class TestCoalitionLoyalty:
    def test_unified_party_is_faithful(self):
        deputies = [deputy(i, "PA") for i in range(10)] + [deputy(10, "PB")]
        assignment = {f"d{i}": 0 for i in range(10)}
        assignment["d10"] = 1
        p = Partition(assignment, 2)
        coalition = CoalitionMap({"PA": "GOVERNMENT", "PB": "OPPOSITION"})
        rows = coalition_loyalty(p, deputies, coalition)
        pa = next(r for r in rows if r.party == "PA")
        assert pa.cluster_pct == (100.0, 0.0)
        assert not pa.unfaithful

    def test_plurality_away_from_alliance_cluster_is_unfaithful(self):
        # alliance's biggest cluster is 0 (via PB); PA has 41% there, 59% in 1
        deputies = ([deputy(i, "PA") for i in range(100)]
                    + [deputy(100 + i, "PB") for i in range(200)])
        assignment = {}
        for i in range(100):
            assignment[f"d{i}"] = 0 if i < 41 else 1
        for i in range(200):
            assignment[f"d{100 + i}"] = 0
        p = Partition(assignment, 2)
        coalition = CoalitionMap({"PA": "GOVERNMENT", "PB": "GOVERNMENT"})
        rows = coalition_loyalty(p, deputies, coalition)
        pa = next(r for r in rows if r.party == "PA")
        assert pa.cluster_pct[0] == pytest.approx(41.0)
        assert pa.unfaithful

    def test_single_party_alliance_is_faithful_by_construction(self):
        deputies = [deputy(i, "PX") for i in range(6)]
        p = Partition({f"d{i}": i % 2 for i in range(6)}, 2)
        rows = coalition_loyalty(p, deputies, CoalitionMap({"PX": "THIRD"}))
        assert not rows[0].unfaithful

    def test_percentages_sum_to_100(self):
        rng = np.random.default_rng(7)
        parties = ["PA", "PB", "PC"]
        deputies = [deputy(i, parties[int(rng.integers(3))]) for i in range(40)]
        p = Partition({f"d{i}": int(rng.integers(4)) for i in range(40)}, 4)
        coalition = CoalitionMap({"PA": "G", "PB": "G", "PC": "O"})
        for row in coalition_loyalty(p, deputies, coalition):
            assert sum(row.cluster_pct) == pytest.approx(100.0, abs=0.1)

    def test_unmapped_party_without_default_is_an_error(self):
        deputies = [deputy(0, "PZ")]
        p = Partition({"d0": 0}, 1)
        with pytest.raises(DataError):
            coalition_loyalty(p, deputies, CoalitionMap({"PA": "G"}))
        rows = coalition_loyalty(p, deputies, CoalitionMap({"PA": "G"}, default="NONE"))
        assert rows[0].alliance == "NONE"


class TestLeadershipStrength:
    def test_spec_example_three_of_nineteen(self):
        # 19 members; the leader plus 2 others share cluster 0 -> 2/18
        deputies = [deputy(i, "PSC") for i in range(19)]
        assignment = {f"d{i}": 0 if i < 3 else 1 for i in range(19)}
        p = Partition(assignment, 2)
        rows = leadership_strength(p, deputies, LeaderMap({"PSC": "d0"}))
        assert rows[0].percentage == pytest.approx(100.0 * 2 / 18)
        assert rows[0].weak

    def test_unified_party_is_100_and_strong(self):
        deputies = [deputy(i, "PT") for i in range(8)]
        p = Partition({f"d{i}": 0 for i in range(8)}, 1)
        rows = leadership_strength(p, deputies, LeaderMap({"PT": "d3"}))
        assert rows[0].percentage == 100.0
        assert not rows[0].weak

    def test_two_member_party_split_is_zero_and_weak(self):
        deputies = [deputy(0, "PV"), deputy(1, "PV")]
        p = Partition({"d0": 0, "d1": 1}, 2)
        rows = leadership_strength(p, deputies, LeaderMap({"PV": "d0"}))
        assert rows[0].percentage == 0.0
        assert rows[0].weak

    def test_single_member_party_reports_100(self):
        deputies = [deputy(0, "REDE"), deputy(1, "PT")]
        p = Partition({"d0": 0, "d1": 1}, 2)
        rows = leadership_strength(p, deputies, LeaderMap({"REDE": "d0"}))
        assert rows[0].percentage == 100.0
        assert not rows[0].weak

    def test_leader_missing_from_partition_names_party(self):
        deputies = [deputy(0, "PT"), deputy(1, "PT")]
        p = Partition({"d1": 0}, 1)
        with pytest.raises(DataError, match="PT"):
            leadership_strength(p, deputies, LeaderMap({"PT": "d0"}))

    def test_leader_map_validation(self):
        deputies = [deputy(0, "PT")]
        with pytest.raises(DataError):
            LeaderMap.validated({"PT": "ghost"}, deputies)
        with pytest.raises(DataError):
            LeaderMap.validated({"PSDB": "d0"}, deputies)


class TestClusterComposition:
    def test_counts_and_ordering(self):
        deputies = [deputy(0, "PA"), deputy(1, "PA"), deputy(2, "PB"),
                    deputy(3, "PB"), deputy(4, "PB"), deputy(5, "PA")]
        p = Partition({"d0": 0, "d1": 0, "d2": 0, "d3": 1, "d4": 1, "d5": 1}, 2)
        rows = cluster_composition(p, deputies)
        assert [(r.cluster, r.party, r.count) for r in rows] == [
            (0, "PA", 2), (0, "PB", 1), (1, "PB", 2), (1, "PA", 1),
        ]

    def test_conservation(self):
        rng = np.random.default_rng(9)
        parties = ["PA", "PB", "PC", "PD"]
        deputies = [deputy(i, parties[int(rng.integers(4))]) for i in range(30)]
        p = Partition({f"d{i}": int(rng.integers(3)) for i in range(30)}, 3)
        rows = cluster_composition(p, deputies)
        assert sum(r.count for r in rows) == 30

    def test_deputies_outside_partition_ignored(self):
        deputies = [deputy(0, "PA"), deputy(1, "PB")]
        p = Partition({"d0": 0}, 1)
        rows = cluster_composition(p, deputies)
        assert [(r.party, r.count) for r in rows] == [("PA", 1)]


class TestPolarizationSummary:
    def coalition(self):
        return CoalitionMap({"PA": "GOVERNMENT", "PB": "OPPOSITION", "PC": "NONE"})

    def test_two_bloc_chamber_is_polarized(self):
        deputies = ([deputy(i, "PA") for i in range(238)]
                    + [deputy(238 + i, "PB") for i in range(190)]
                    + [deputy(428 + i, "PC") for i in range(22)])
        assignment = {}
        for i in range(238):
            assignment[f"d{i}"] = 0
        for i in range(190):
            assignment[f"d{238 + i}"] = 1
        for i in range(22):
            assignment[f"d{428 + i}"] = 2
        p = Partition(assignment, 3)
        report = polarization_summary(p, deputies, self.coalition())
        assert report.polarized
        assert report.coverage == pytest.approx(428 / 450)
        assert report.rows[0].dominant_alliance == "GOVERNMENT"
        assert report.rows[1].dominant_alliance == "OPPOSITION"

    def test_single_cluster_is_not_polarized(self):
        deputies = [deputy(i, "PA") for i in range(10)]
        p = Partition({f"d{i}": 0 for i in range(10)}, 1)
        assert not polarization_summary(p, deputies, self.coalition()).polarized

    def test_four_equal_clusters_are_not_polarized(self):
        deputies = [deputy(i, "PA" if i % 2 else "PB") for i in range(40)]
        p = Partition({f"d{i}": i % 4 for i in range(40)}, 4)
        report = polarization_summary(p, deputies, self.coalition())
        assert report.coverage == pytest.approx(0.5)
        assert not report.polarized

    def test_same_dominant_alliance_is_not_polarized(self):
        deputies = [deputy(i, "PA") for i in range(20)]
        p = Partition({f"d{i}": i % 2 for i in range(20)}, 2)
        report = polarization_summary(p, deputies, self.coalition())
        assert report.coverage == 1.0
        assert not report.polarized

    def test_dominance_share(self):
        deputies = [deputy(0, "PA"), deputy(1, "PA"), deputy(2, "PB"), deputy(3, "PB")]
        p = Partition({"d0": 0, "d1": 0, "d2": 0, "d3": 1}, 2)
        report = polarization_summary(p, deputies, self.coalition())
        assert report.rows[0].dominance_share == pytest.approx(2 / 3)
