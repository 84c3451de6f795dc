"""Clustering comparison metrics."""

from __future__ import annotations

from collections import Counter
from typing import Hashable, Sequence


def _comb2(x: int) -> int:
    return x * (x - 1) // 2


def adjusted_rand_index(labels_a: Sequence[Hashable],
                        labels_b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement between two labelings of the same items.

    1.0 means identical partitions (up to relabeling), 0.0 is the expected
    value for independent random labelings. Degenerate pairs where the index
    is undefined (both labelings trivial) score 1.0.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError("labelings must cover the same items")
    n = len(labels_a)
    contingency = Counter(zip(labels_a, labels_b))
    sum_cells = sum(_comb2(c) for c in contingency.values())
    sum_a = sum(_comb2(c) for c in Counter(labels_a).values())
    sum_b = sum(_comb2(c) for c in Counter(labels_b).values())
    total = _comb2(n)
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_cells - expected) / (max_index - expected)
