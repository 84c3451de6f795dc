import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from voteclust.metrics import adjusted_rand_index


def test_identical_labelings_score_one():
    assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0


def test_degenerate_labelings_score_one():
    assert adjusted_rand_index([0, 0, 0], [0, 0, 0]) == 1.0
    assert adjusted_rand_index([0], [0]) == 1.0


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        adjusted_rand_index([0, 1], [0])


def test_matches_sklearn_on_random_labelings():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        a = rng.integers(0, int(rng.integers(1, 6)), size=n)
        b = rng.integers(0, int(rng.integers(1, 6)), size=n)
        assert adjusted_rand_index(list(a), list(b)) == pytest.approx(
            adjusted_rand_score(a, b), abs=1e-12)


def test_labels_may_be_arbitrary_hashables():
    assert adjusted_rand_index(["x", "x", "y"], [4, 4, 9]) == 1.0
