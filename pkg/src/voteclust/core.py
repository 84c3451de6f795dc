"""Shared domain types: votes, deputies, signed graphs, partitions, block totals.

These are plain immutable values with validation only; algorithms live in the
other modules. All iteration orders are fixed by first-appearance order so
downstream results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping


class VoteClustError(Exception):
    """Base class for errors raised by this package."""


class DataError(VoteClustError):
    """Malformed, inconsistent, or unusable input data."""


class InvalidPartitionError(VoteClustError):
    """A partition violates its invariants against the given graph."""


class Vote(Enum):
    """The five vote choices a deputy can hold on one proposition."""

    FOR = "FOR"
    AGAINST = "AGAINST"
    ABSTAIN = "ABSTAIN"
    OBSTRUCTION = "OBSTRUCTION"
    ABSENT = "ABSENT"


@dataclass(frozen=True)
class Deputy:
    """One member of the chamber: opaque unique id plus display attributes."""

    id: str
    name: str
    party: str
    state: str

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("deputy id must be non-empty")
        if not self.party:
            raise DataError(f"deputy {self.id!r}: party must be non-empty")
        if not self.state:
            raise DataError(f"deputy {self.id!r}: state must be non-empty")


@dataclass(frozen=True)
class VoteRecord:
    """One deputy's vote on one proposition (the raw input atom)."""

    proposition_id: str
    deputy_id: str
    vote: Vote


class SignedGraph:
    """Immutable undirected graph with signed nonzero weights in [-1, +1].

    Vertices are deputy ids in a fixed order. Each unordered pair is stored
    once as an index triple ``(u, v, w)`` with ``u < v`` in vertex order;
    zero-weight pairs are represented by edge absence.
    """

    __slots__ = ("vertex_ids", "edges", "_index", "_adjacency", "_pair_weight")

    def __init__(
        self,
        vertex_ids: Iterable[str],
        edges: Iterable[tuple[str, str, float]],
    ) -> None:
        ids = tuple(vertex_ids)
        index: dict[str, int] = {}
        for i, vid in enumerate(ids):
            if not vid:
                raise DataError("vertex ids must be non-empty")
            if vid in index:
                raise DataError(f"duplicate vertex id {vid!r}")
            index[vid] = i

        pair_weight: dict[tuple[int, int], float] = {}
        adjacency: list[list[tuple[int, float]]] = [[] for _ in ids]
        for u_id, v_id, w in edges:
            try:
                u, v = index[u_id], index[v_id]
            except KeyError as exc:
                raise DataError(f"edge endpoint {exc.args[0]!r} is not a vertex") from None
            if u == v:
                raise DataError(f"self-loop on vertex {u_id!r}")
            w = float(w)
            if not (0.0 < abs(w) <= 1.0):
                raise DataError(
                    f"edge ({u_id!r}, {v_id!r}): weight {w} outside (0, 1] in magnitude"
                )
            if u > v:
                u, v = v, u
            if (u, v) in pair_weight:
                raise DataError(f"duplicate edge ({u_id!r}, {v_id!r})")
            pair_weight[(u, v)] = w

        for (u, v), w in pair_weight.items():
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))

        self.vertex_ids: tuple[str, ...] = ids
        self.edges: tuple[tuple[int, int, float], ...] = tuple(
            (u, v, pair_weight[(u, v)]) for (u, v) in sorted(pair_weight)
        )
        self._index = index
        self._adjacency: tuple[tuple[tuple[int, float], ...], ...] = tuple(
            tuple(sorted(nbrs)) for nbrs in adjacency
        )
        self._pair_weight = pair_weight

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    @property
    def m(self) -> int:
        return len(self.edges)

    def index_of(self, vertex_id: str) -> int:
        return self._index[vertex_id]

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._index

    def weight(self, u_id: str, v_id: str) -> float | None:
        """Weight of the unordered pair, or None if no edge. Order-insensitive."""
        u, v = self._index[u_id], self._index[v_id]
        if u > v:
            u, v = v, u
        return self._pair_weight.get((u, v))

    def neighbors(self, vertex_index: int) -> tuple[tuple[int, float], ...]:
        """Incident edges of one vertex as (neighbor index, weight) pairs."""
        return self._adjacency[vertex_index]

    def total_abs_weight(self) -> float:
        return math.fsum(abs(w) for _, _, w in self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self.vertex_ids == other.vertex_ids and self.edges == other.edges

    def __repr__(self) -> str:
        return f"SignedGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Partition:
    """Assignment of vertices to cluster indices in [0, k).

    The constructor checks only local facts (positive k, labels in range);
    whether the assignment covers a graph's vertex set exactly and leaves no
    cluster empty is checked by :func:`validate_partition`.
    """

    assignment: Mapping[str, int]
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        frozen = {}
        for vid, label in self.assignment.items():
            if not isinstance(label, int) or isinstance(label, bool):
                raise ValueError(f"cluster index for {vid!r} must be int, got {label!r}")
            if not 0 <= label < self.k:
                raise ValueError(
                    f"cluster index {label} for {vid!r} outside [0, {self.k})"
                )
            frozen[vid] = label
        object.__setattr__(self, "assignment", frozen)

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for label in self.assignment.values():
            sizes[label] += 1
        return sizes

    def relabeled(self, mapping: Mapping[int, int]) -> "Partition":
        """New partition with cluster indices permuted by `mapping`."""
        return Partition({v: mapping[c] for v, c in self.assignment.items()}, self.k)


def validate_partition(graph: SignedGraph, partition: Partition) -> bool:
    """True iff the partition covers the graph's vertices exactly, once each,
    with every cluster in [0, k) non-empty. Never raises."""
    assignment = partition.assignment
    if len(assignment) != graph.n:
        return False
    seen = [0] * partition.k
    for vid in graph.vertex_ids:
        label = assignment.get(vid)
        if label is None:
            return False
        seen[label] += 1
    return all(count > 0 for count in seen)


def partition_labels(graph: SignedGraph, partition: Partition) -> list[int]:
    """Cluster labels aligned with the graph's vertex order.

    Raises InvalidPartitionError when the partition does not validate.
    """
    if not validate_partition(graph, partition):
        raise InvalidPartitionError("partition does not match the graph's vertex set")
    return [partition.assignment[vid] for vid in graph.vertex_ids]


def partition_from_labels(graph: SignedGraph, labels: Iterable[int], k: int) -> Partition:
    labels = list(labels)
    if len(labels) != graph.n:
        raise ValueError(f"expected {graph.n} labels, got {len(labels)}")
    return Partition(dict(zip(graph.vertex_ids, (int(l) for l in labels))), k)


class BlockTotals:
    """Per cluster-pair sums of positive weight and absolute negative weight.

    Blocks are unordered pairs {a, b} with a <= b; a == b is the intra-cluster
    block. Every one of the k(k+1)/2 blocks is present, zero-valued when no
    edge falls in it.
    """

    __slots__ = ("k", "_pos", "_neg")

    def __init__(self, k: int, pos: Mapping[tuple[int, int], float],
                 neg: Mapping[tuple[int, int], float]) -> None:
        self.k = k
        self._pos = {}
        self._neg = {}
        for a in range(k):
            for b in range(a, k):
                p = float(pos.get((a, b), 0.0))
                q = float(neg.get((a, b), 0.0))
                if p < 0 or q < 0:
                    raise ValueError(f"block ({a},{b}) has a negative total")
                self._pos[(a, b)] = p
                self._neg[(a, b)] = q

    @staticmethod
    def block_key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a <= b else (b, a)

    def pos(self, a: int, b: int) -> float:
        return self._pos[self.block_key(a, b)]

    def neg(self, a: int, b: int) -> float:
        return self._neg[self.block_key(a, b)]

    def blocks(self) -> Iterator[tuple[tuple[int, int], float, float]]:
        """Iterate ((a, b), pos, neg) over all blocks, a <= b, in sorted order."""
        for key in sorted(self._pos):
            yield key, self._pos[key], self._neg[key]

    def total_abs_weight(self) -> float:
        return math.fsum(self._pos.values()) + math.fsum(self._neg.values())

    def __repr__(self) -> str:
        return f"BlockTotals(k={self.k})"
