"""Partition imbalance objectives for signed graphs.

Two objectives are evaluated over per-block weight totals. The classic
correlation-clustering imbalance charges negative weight inside clusters and
positive weight between them. The symmetric relaxed imbalance lets every
block (intra or inter) legitimately be positive or negative and charges only
its minority sign, which is what makes all-positive mediation groups free.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from .core import (
    BlockTotals,
    InvalidPartitionError,
    Partition,
    SignedGraph,
    validate_partition,
)

SIGN_POSITIVE = "POSITIVE"
SIGN_NEGATIVE = "NEGATIVE"


@dataclass(frozen=True)
class ProblemKind:
    """Which objective is being optimized; SRCC carries its fixed cluster count."""

    name: str
    k: int | None = None

    def __post_init__(self) -> None:
        if self.name not in ("cc", "srcc"):
            raise ValueError(f"unknown problem kind {self.name!r}")
        if self.name == "srcc":
            if self.k is None or self.k < 1:
                raise ValueError("srcc requires a cluster count k >= 1")
        elif self.k is not None:
            raise ValueError("cc does not take a cluster count")

    @classmethod
    def cc(cls) -> "ProblemKind":
        return cls("cc")

    @classmethod
    def srcc(cls, k: int) -> "ProblemKind":
        return cls("srcc", k)

    @property
    def is_srcc(self) -> bool:
        return self.name == "srcc"


@dataclass(frozen=True)
class ImbalanceBreakdown:
    """Objective value together with the block totals it was derived from.

    block_signs is present for the relaxed objective only and records each
    block's majority sign (ties count as positive; reporting only, the value
    is unaffected).
    """

    total: float
    blocks: BlockTotals
    block_signs: dict[tuple[int, int], str] | None = None


def block_totals(graph: SignedGraph, partition: Partition) -> BlockTotals:
    """Sum positive and absolute negative weight per unordered cluster pair.

    Per-block sums use exact (compensated) summation, so conservation against
    the graph's total absolute weight holds to well below 1e-9.
    """
    if not validate_partition(graph, partition):
        raise InvalidPartitionError("partition does not validate against the graph")
    labels = [partition.assignment[vid] for vid in graph.vertex_ids]
    pos_terms: dict[tuple[int, int], list[float]] = defaultdict(list)
    neg_terms: dict[tuple[int, int], list[float]] = defaultdict(list)
    for u, v, w in graph.edges:
        key = BlockTotals.block_key(labels[u], labels[v])
        if w > 0:
            pos_terms[key].append(w)
        else:
            neg_terms[key].append(-w)
    pos = {key: math.fsum(terms) for key, terms in pos_terms.items()}
    neg = {key: math.fsum(terms) for key, terms in neg_terms.items()}
    return BlockTotals(partition.k, pos, neg)


def cc_imbalance(graph: SignedGraph, partition: Partition) -> float:
    """Intra-cluster negative weight plus inter-cluster positive weight."""
    blocks = block_totals(graph, partition)
    return math.fsum(
        neg if a == b else pos for (a, b), pos, neg in blocks.blocks()
    )


def srcc_imbalance(graph: SignedGraph, partition: Partition) -> ImbalanceBreakdown:
    """Minority-sign weight summed over every block (relaxed imbalance)."""
    blocks = block_totals(graph, partition)
    total = math.fsum(min(pos, neg) for _, pos, neg in blocks.blocks())
    signs = {
        key: SIGN_POSITIVE if pos >= neg else SIGN_NEGATIVE
        for key, pos, neg in blocks.blocks()
    }
    return ImbalanceBreakdown(total=total, blocks=blocks, block_signs=signs)


def relative_imbalance(graph: SignedGraph, breakdown: ImbalanceBreakdown) -> float:
    """Imbalance as a percentage of the graph's total absolute edge weight."""
    if graph.m == 0:
        raise ValueError("relative imbalance is undefined on an edgeless graph")
    return 100.0 * breakdown.total / graph.total_abs_weight()


def _incident_sums(graph: SignedGraph, labels: list[int],
                   vertex_index: int) -> tuple[dict[int, float], dict[int, float]]:
    """Positive / absolute-negative incident weight of one vertex per cluster."""
    pos: dict[int, float] = defaultdict(float)
    neg: dict[int, float] = defaultdict(float)
    for nbr, w in graph.neighbors(vertex_index):
        c = labels[nbr]
        if w > 0:
            pos[c] += w
        else:
            neg[c] += -w
    return pos, neg


def cc_move_delta(
    graph: SignedGraph,
    partition: Partition,
    blocks: BlockTotals,
    vertex: str,
    target_cluster: int,
) -> float:
    """Exact CC objective change of relocating one vertex, from its incident
    edges only. target_cluster == k opens a new singleton cluster."""
    if not validate_partition(graph, partition):
        raise InvalidPartitionError("partition does not validate against the graph")
    k = partition.k
    if not 0 <= target_cluster <= k:
        raise ValueError(f"target cluster {target_cluster} outside [0, {k}]")
    source = partition.assignment[vertex]
    if target_cluster == source:
        raise ValueError("vertex is already in the target cluster")
    if target_cluster == k and partition.cluster_sizes()[source] == 1:
        raise ValueError(
            "moving the sole member of a cluster to a new singleton is a relabel, "
            "not a move"
        )
    labels = [partition.assignment[vid] for vid in graph.vertex_ids]
    vi = graph.index_of(vertex)
    terms = []
    for nbr, w in graph.neighbors(vi):
        c = labels[nbr]
        cost_before = -w if (c == source and w < 0) else (w if (c != source and w > 0) else 0.0)
        cost_after = -w if (c == target_cluster and w < 0) else (w if (c != target_cluster and w > 0) else 0.0)
        terms.append(cost_after - cost_before)
    return math.fsum(terms)


def srcc_move_delta(
    graph: SignedGraph,
    partition: Partition,
    blocks: BlockTotals,
    vertex: str,
    target_cluster: int,
) -> float:
    """Exact relaxed-imbalance change of relocating one vertex.

    Only blocks touching the source or target cluster change, so the delta is
    assembled from those blocks' adjusted totals.
    """
    if not validate_partition(graph, partition):
        raise InvalidPartitionError("partition does not validate against the graph")
    k = partition.k
    if not 0 <= target_cluster < k:
        raise ValueError(f"target cluster {target_cluster} outside [0, {k})")
    source = partition.assignment[vertex]
    if target_cluster == source:
        raise ValueError("vertex is already in the target cluster")
    if partition.cluster_sizes()[source] == 1:
        raise ValueError("move would empty the source cluster")

    labels = [partition.assignment[vid] for vid in graph.vertex_ids]
    vi = graph.index_of(vertex)
    pos_inc, neg_inc = _incident_sums(graph, labels, vi)

    adjust: dict[tuple[int, int], list[float]] = defaultdict(lambda: [0.0, 0.0])
    for c in set(pos_inc) | set(neg_inc):
        p, q = pos_inc.get(c, 0.0), neg_inc.get(c, 0.0)
        lose = BlockTotals.block_key(source, c)
        gain = BlockTotals.block_key(target_cluster, c)
        adjust[lose][0] -= p
        adjust[lose][1] -= q
        adjust[gain][0] += p
        adjust[gain][1] += q

    terms = []
    for (a, b), (dp, dq) in adjust.items():
        pos0, neg0 = blocks.pos(a, b), blocks.neg(a, b)
        terms.append(min(pos0 + dp, neg0 + dq) - min(pos0, neg0))
    return math.fsum(terms)
