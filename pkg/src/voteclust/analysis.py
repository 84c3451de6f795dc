"""Post-clustering reports: mediation, coalition loyalty, leadership strength,
cluster composition, polarization, plus the relative-imbalance summary.

All reports are pure functions of the graph/partition and roster metadata.
Deputies absent from the partition (they never voted in the period, so they
are not graph vertices) are ignored throughout.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    DataError,
    Deputy,
    InvalidPartitionError,
    Partition,
    SignedGraph,
    validate_partition,
)

ALLIANCE_NONE = "NONE"

DEFAULT_MEDIATION_THRESHOLD = 0.9
DEFAULT_POLARIZATION_COVERAGE = 0.9
WEAK_LEADERSHIP_PCT = 50.0


@dataclass(frozen=True)
class CoalitionMap:
    """Party code -> alliance label, with an optional fallback label.

    When no default is set, asking for an unmapped party is a data error.
    """

    alliances: Mapping[str, str]
    default: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alliances", dict(self.alliances))

    def alliance_for(self, party: str) -> str:
        alliance = self.alliances.get(party)
        if alliance is None:
            if self.default is None:
                raise DataError(
                    f"party {party!r} has no alliance mapping and no default is set"
                )
            return self.default
        return alliance


@dataclass(frozen=True)
class LeaderMap:
    """Party code -> deputy id of its leader, checked against the roster."""

    leaders: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "leaders", dict(self.leaders))

    @classmethod
    def validated(cls, leaders: Mapping[str, str],
                  deputies: Iterable[Deputy]) -> "LeaderMap":
        roster = {d.id: d for d in deputies}
        for party, leader_id in leaders.items():
            deputy = roster.get(leader_id)
            if deputy is None:
                raise DataError(f"leader {leader_id!r} of party {party!r} not in roster")
            if deputy.party != party:
                raise DataError(
                    f"leader {leader_id!r} belongs to {deputy.party!r}, not {party!r}"
                )
        return cls(leaders)


@dataclass(frozen=True)
class MediationVerdict:
    cluster: int
    external_positive_ratio: float
    internal_positive_ratio: float
    is_mediator: bool


@dataclass(frozen=True)
class LoyaltyRow:
    alliance: str
    party: str
    members: int
    cluster_pct: tuple[float, ...]
    plurality_cluster: int
    unfaithful: bool


@dataclass(frozen=True)
class LeadershipRow:
    party: str
    percentage: float
    weak: bool


@dataclass(frozen=True)
class CompositionRow:
    cluster: int
    party: str
    count: int


@dataclass(frozen=True)
class PolarizationRow:
    cluster: int
    size: int
    dominant_alliance: str
    dominance_share: float


@dataclass(frozen=True)
class PolarizationReport:
    rows: tuple[PolarizationRow, ...]
    polarized: bool
    coverage: float


def detect_mediation(
    graph: SignedGraph,
    partition: Partition,
    threshold: float = DEFAULT_MEDIATION_THRESHOLD,
    weight_based: bool = True,
) -> list[MediationVerdict]:
    """Flag clusters whose internal and external relationships are both
    overwhelmingly positive.

    Ratios are weight shares by default (count shares with weight_based
    False). A cluster with no intra edges, or no external edges, gets the
    corresponding ratio 1 by convention: no evidence of hostility.
    """
    if not validate_partition(graph, partition):
        raise InvalidPartitionError("partition does not validate against the graph")
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")

    labels = [partition.assignment[vid] for vid in graph.vertex_ids]
    k = partition.k
    intra_pos = [0.0] * k
    intra_all = [0.0] * k
    ext_pos = [0.0] * k
    ext_all = [0.0] * k
    for u, v, w in graph.edges:
        magnitude = abs(w) if weight_based else 1.0
        positive = magnitude if w > 0 else 0.0
        cu, cv = labels[u], labels[v]
        if cu == cv:
            intra_all[cu] += magnitude
            intra_pos[cu] += positive
        else:
            for c in (cu, cv):
                ext_all[c] += magnitude
                ext_pos[c] += positive

    verdicts = []
    for c in range(k):
        internal = intra_pos[c] / intra_all[c] if intra_all[c] > 0 else 1.0
        external = ext_pos[c] / ext_all[c] if ext_all[c] > 0 else 1.0
        verdicts.append(MediationVerdict(
            cluster=c,
            external_positive_ratio=external,
            internal_positive_ratio=internal,
            is_mediator=internal > threshold and external > threshold,
        ))
    return verdicts


def _clustered_deputies(partition: Partition,
                        deputies: Sequence[Deputy]) -> list[tuple[Deputy, int]]:
    return [
        (d, partition.assignment[d.id])
        for d in deputies
        if d.id in partition.assignment
    ]


def _plurality(counts: Sequence[int]) -> int:
    """Index of the largest count; ties go to the lowest index."""
    best = 0
    for i, c in enumerate(counts):
        if c > counts[best]:
            best = i
    return best


def coalition_loyalty(
    partition: Partition,
    deputies: Sequence[Deputy],
    coalition: CoalitionMap,
) -> list[LoyaltyRow]:
    """Percentage of each party's clustered deputies per cluster, with an
    UNFAITHFUL flag when the party's plurality cluster is not the most
    populous cluster of its alliance."""
    clustered = _clustered_deputies(partition, deputies)
    k = partition.k

    party_counts: dict[str, list[int]] = defaultdict(lambda: [0] * k)
    alliance_counts: dict[str, list[int]] = defaultdict(lambda: [0] * k)
    party_alliance: dict[str, str] = {}
    for deputy, cluster in clustered:
        alliance = coalition.alliance_for(deputy.party)
        party_alliance[deputy.party] = alliance
        party_counts[deputy.party][cluster] += 1
        alliance_counts[alliance][cluster] += 1

    rows = []
    for party in sorted(party_counts):
        counts = party_counts[party]
        members = sum(counts)
        alliance = party_alliance[party]
        plurality = _plurality(counts)
        alliance_top = _plurality(alliance_counts[alliance])
        rows.append(LoyaltyRow(
            alliance=alliance,
            party=party,
            members=members,
            cluster_pct=tuple(100.0 * c / members for c in counts),
            plurality_cluster=plurality,
            unfaithful=plurality != alliance_top,
        ))
    rows.sort(key=lambda r: (r.alliance, r.party))
    return rows


def leadership_strength(
    partition: Partition,
    deputies: Sequence[Deputy],
    leaders: LeaderMap,
) -> list[LeadershipRow]:
    """Share of each party's deputies clustered with their leader.

    The leader is excluded from both numerator and denominator (agreeing with
    oneself carries no information); single-member parties report 100 and are
    never flagged. Parties without a leader entry are omitted.
    """
    clustered = _clustered_deputies(partition, deputies)
    by_party: dict[str, list[tuple[Deputy, int]]] = defaultdict(list)
    for deputy, cluster in clustered:
        by_party[deputy.party].append((deputy, cluster))

    rows = []
    for party in sorted(leaders.leaders):
        leader_id = leaders.leaders[party]
        members = by_party.get(party, [])
        if not members:
            continue
        leader_cluster = partition.assignment.get(leader_id)
        if leader_cluster is None:
            raise DataError(
                f"leader {leader_id!r} of party {party!r} is not in the partition"
            )
        others = [cluster for deputy, cluster in members if deputy.id != leader_id]
        if not others:
            rows.append(LeadershipRow(party=party, percentage=100.0, weak=False))
            continue
        with_leader = sum(1 for cluster in others if cluster == leader_cluster)
        pct = 100.0 * with_leader / len(others)
        rows.append(LeadershipRow(party=party, percentage=pct,
                                  weak=pct < WEAK_LEADERSHIP_PCT))
    return rows


def cluster_composition(
    partition: Partition,
    deputies: Sequence[Deputy],
) -> list[CompositionRow]:
    """Deputy counts per (cluster, party); clusters ascending, then count
    descending, then party code."""
    counts: Counter[tuple[int, str]] = Counter()
    for deputy, cluster in _clustered_deputies(partition, deputies):
        counts[(cluster, deputy.party)] += 1
    rows = [
        CompositionRow(cluster=cluster, party=party, count=count)
        for (cluster, party), count in counts.items()
    ]
    rows.sort(key=lambda r: (r.cluster, -r.count, r.party))
    return rows


def polarization_summary(
    partition: Partition,
    deputies: Sequence[Deputy],
    coalition: CoalitionMap,
    coverage_threshold: float = DEFAULT_POLARIZATION_COVERAGE,
) -> PolarizationReport:
    """Per-cluster dominant alliance, plus a POLARIZED verdict when the two
    largest clusters cover enough of the chamber under different alliances."""
    clustered = _clustered_deputies(partition, deputies)
    k = partition.k
    sizes = [0] * k
    alliance_per_cluster: list[Counter[str]] = [Counter() for _ in range(k)]
    for deputy, cluster in clustered:
        sizes[cluster] += 1
        alliance_per_cluster[cluster][coalition.alliance_for(deputy.party)] += 1

    rows = []
    for c in range(k):
        if sizes[c] == 0:
            rows.append(PolarizationRow(c, 0, ALLIANCE_NONE, 0.0))
            continue
        # max share, ties to the lexicographically smallest alliance label
        dominant = min(
            alliance_per_cluster[c].items(),
            key=lambda item: (-item[1], item[0]),
        )
        rows.append(PolarizationRow(
            cluster=c,
            size=sizes[c],
            dominant_alliance=dominant[0],
            dominance_share=dominant[1] / sizes[c],
        ))

    total = sum(sizes)
    polarized = False
    coverage = 0.0
    if total > 0 and k >= 2:
        order = sorted(range(k), key=lambda c: (-sizes[c], c))
        first, second = order[0], order[1]
        coverage = (sizes[first] + sizes[second]) / total
        polarized = (
            coverage >= coverage_threshold
            and rows[first].dominant_alliance != rows[second].dominant_alliance
        )
    elif total > 0:
        coverage = 1.0
    return PolarizationReport(rows=tuple(rows), polarized=polarized, coverage=coverage)
