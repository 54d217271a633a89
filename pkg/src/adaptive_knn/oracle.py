"""Brute-force exact k-NN, the correctness yardstick and the n*m cost baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, DimensionError, Query


@dataclass(frozen=True)
class OracleResult:
    sorted_indices: np.ndarray
    k_set: frozenset[int]
    distances: np.ndarray


def brute_force(data: Dataset, query: Query, k: int) -> OracleResult:
    if not 1 <= k <= data.n:
        raise ValueError(f"k must lie in [1, {data.n}], got {k}")
    if query.m != data.m:
        raise DimensionError(f"query has {query.m} coordinates, dataset has {data.m}")
    diff = data.points - query.coords
    dist = np.einsum("ij,ij->i", diff, diff) / data.m
    # lexsort sorts by the last key first: distance, then index
    order = np.lexsort((np.arange(data.n), dist))
    return OracleResult(order, frozenset(order[:k].tolist()), dist)


def recall(returned, oracle_k) -> float:
    truth = set(oracle_k)
    if not truth:
        raise ValueError("oracle set is empty")
    return len(truth.intersection(returned)) / len(truth)
