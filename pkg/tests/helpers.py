"""Shared test utilities: random instances and independent reference
evaluators (kept deliberately separate from the package's code paths)."""

from __future__ import annotations

import math

import numpy as np

from voteclust.core import Partition, SignedGraph

DYADIC_WEIGHTS = (-1.0, -0.5, 0.5, 1.0)


def random_signed_graph(rng: np.random.Generator, n: int, density: float = 0.6,
                        weights: tuple[float, ...] = DYADIC_WEIGHTS) -> SignedGraph:
    ids = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.append((ids[i], ids[j], float(rng.choice(weights))))
    return SignedGraph(ids, edges)


def random_partition(rng: np.random.Generator, graph: SignedGraph, k: int) -> Partition:
    """Valid random partition: one vertex pinned per cluster, rest uniform."""
    n = graph.n
    assert n >= k
    labels = np.empty(n, dtype=np.int64)
    pinned = rng.choice(n, size=k, replace=False)
    labels[pinned] = np.arange(k)
    free = np.setdiff1d(np.arange(n), pinned)
    labels[free] = rng.integers(0, k, size=len(free))
    return Partition(dict(zip(graph.vertex_ids, (int(c) for c in labels))), k)


def cc_value_by_edges(graph: SignedGraph, partition: Partition) -> float:
    """Reference CC imbalance: a single pass over the edge list."""
    a = partition.assignment
    terms = []
    for u, v, w in graph.edges:
        same = a[graph.vertex_ids[u]] == a[graph.vertex_ids[v]]
        if same and w < 0:
            terms.append(-w)
        elif not same and w > 0:
            terms.append(w)
    return math.fsum(terms)


def sri_value_by_blocks(graph: SignedGraph, partition: Partition) -> float:
    """Reference relaxed imbalance: sign-separated block sums, then min."""
    a = partition.assignment
    pos: dict[tuple[int, int], float] = {}
    neg: dict[tuple[int, int], float] = {}
    for u, v, w in graph.edges:
        cu = a[graph.vertex_ids[u]]
        cv = a[graph.vertex_ids[v]]
        key = (min(cu, cv), max(cu, cv))
        if w > 0:
            pos[key] = pos.get(key, 0.0) + w
        else:
            neg[key] = neg.get(key, 0.0) - w
    total = 0.0
    for key in set(pos) | set(neg):
        total += min(pos.get(key, 0.0), neg.get(key, 0.0))
    return total


def enumerate_partitions(n: int):
    """All set partitions of range(n) as label lists, via restricted growth."""
    labels = [0] * n

    def rec(i: int, max_label: int):
        if i == n:
            yield list(labels)
            return
        for c in range(max_label + 2):
            labels[i] = c
            yield from rec(i + 1, max(max_label, c))

    yield from rec(1, 0) if n > 0 else iter(())


def exhaustive_optimum(graph: SignedGraph, value_fn, exact_k: int | None = None):
    """Reference global optimum by explicit enumeration (small n only)."""
    best = None
    best_labels = None
    for labels in enumerate_partitions(graph.n):
        k = max(labels) + 1
        if exact_k is not None and k != exact_k:
            continue
        partition = Partition(dict(zip(graph.vertex_ids, labels)), k)
        value = value_fn(graph, partition)
        if best is None or value < best - 1e-12:
            best = value
            best_labels = labels
    return best, best_labels
