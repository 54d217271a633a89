import numpy as np
import pytest

from adaptive_knn.core import Dataset, Query
from adaptive_knn.oracle import brute_force, recall

from conftest import random_instance


def test_query_in_dataset_ranks_first():
    data, _ = random_instance(20, 8, seed=1)
    res = brute_force(data, Query(data.points[13]), 3)
    assert res.sorted_indices[0] == 13 and res.distances[13] == 0.0


def test_two_points_in_order():
    # distances 0.1 and 0.2 with m = 1: squared offsets 0.1 and 0.2
    data = Dataset([[np.sqrt(0.2)], [np.sqrt(0.1)]])
    res = brute_force(data, Query([0.0]), 1)
    assert res.sorted_indices.tolist() == [1, 0]
    assert res.distances == pytest.approx([0.2, 0.1])


def test_matches_double_loop():
    data, query = random_instance(100, 37, seed=2)
    dist = []
    for i in range(data.n):
        s = 0.0
        for j in range(data.m):
            s += (data.points[i, j] - query.coords[j]) ** 2
        dist.append((s / data.m, i))
    expected = [i for _, i in sorted(dist)]
    res = brute_force(data, query, 10)
    assert res.sorted_indices.tolist() == expected
    assert res.k_set == frozenset(expected[:10])


def test_ties_break_by_index():
    data = Dataset([[0.2], [-0.2], [0.2], [0.0]])
    res = brute_force(data, Query([0.0]), 2)
    assert res.sorted_indices.tolist() == [3, 0, 1, 2]


def test_k_out_of_range():
    data, query = random_instance(4, 3)
    with pytest.raises(ValueError):
        brute_force(data, query, 0)
    with pytest.raises(ValueError):
        brute_force(data, query, 5)


def test_recall():
    truth = set(range(10))
    assert recall(set(range(12)), truth) == 1.0
    assert recall({20, 21}, truth) == 0.0
    assert recall(set(range(7)) | {50, 51, 52}, truth) == pytest.approx(0.7)
