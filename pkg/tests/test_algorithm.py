import numpy as np
import pytest

from adaptive_knn.algorithm import (
    EVALS,
    AdaptiveKNN,
    IterationLimitExceeded,
    RunConfig,
    TerminationStatus,
    accounting,
    run,
)
from adaptive_knn.core import Dataset, DimensionError, Query, SamplingMode, Variant, exact_distance
from adaptive_knn.datagen import SubspaceSpec, generate_subspace
from adaptive_knn.oracle import brute_force, recall

from conftest import random_instance


def same_report(a, b):
    da, db = a.to_dict(timing=False), b.to_dict(timing=False)
    return da == db


def test_single_coordinate_forces_exact_answer():
    data = Dataset([[0.4], [-0.1], [0.05]])
    query = Query([0.0])
    report = run(data, query, RunConfig(k=1, h=1, seed=3))
    assert report.result_set == [1, 2]
    assert report.exact_arm_count == 3


@pytest.mark.parametrize("mode", list(SamplingMode))
def test_desk_scale_failure_rate_below_delta(mode):
    delta, failures, trials = 0.05, 0, 200
    for seed in range(trials):
        data, query = generate_subspace(SubspaceSpec(n=60, m=128, p=3, seed=seed))
        cfg = RunConfig(k=3, h=2, delta=delta, variant=Variant.THEORY, sampling_mode=mode, seed=seed)
        report = run(data, query, cfg)
        truth = brute_force(data, query, 3)
        failures += recall(report.result_set, truth.k_set) < 1.0
    assert failures / trials <= delta


def test_all_exact_terminates_without_stepping():
    data, query = random_instance(6, 1, seed=1)
    search = AdaptiveKNN(data, query, RunConfig(k=2, h=1))
    assert search.step() is TerminationStatus.TERMINATED
    assert search.report().iterations == 0


def test_two_arms_each_sampled_once_per_iteration():
    data, query = random_instance(2, 500, seed=2)
    search = AdaptiveKNN(data, query, RunConfig(k=1, h=0, variant=Variant.THEORY, delta=0.1))
    for _ in range(10):
        before = search.count.copy()
        search.step()
        assert (search.count - before).tolist() == [1, 1]


def test_two_evaluations_per_iteration_outside_fallback():
    data, query = generate_subspace(SubspaceSpec(n=1000, m=256, p=10, seed=4))
    search = AdaptiveKNN(data, query, RunConfig(k=10, h=10, c_alpha=0.05, seed=4))
    assert search.stats[EVALS] == 1000
    for _ in range(3000):
        evals, exact = int(search.stats[EVALS]), int(search.exact.sum())
        if search.step() is TerminationStatus.TERMINATED:
            break
        spent = int(search.stats[EVALS]) - evals
        converted = int(search.exact.sum()) - exact
        if converted == 0:
            assert spent == 2
        else:
            assert spent <= 2 + converted * 256


def test_accounting_bounds():
    # identical points: no arm can be separated before it is exact
    rng = np.random.default_rng(5)
    row = rng.uniform(-0.5, 0.5, 8)
    data, query = Dataset(np.tile(row, (6, 1))), Query(rng.uniform(-0.5, 0.5, 8))
    cfg = RunConfig(k=2, h=1, sampling_mode=SamplingMode.WITHOUT_REPLACEMENT)
    search = AdaptiveKNN(data, query, cfg)
    assert accounting(search.report()) == pytest.approx(1 / 8)  # initialization only
    report = search.run()
    assert report.exact_arm_count == 6
    assert accounting(report) == 1.0


def test_without_replacement_exact_estimates():
    data, query = random_instance(12, 16, seed=6)
    cfg = RunConfig(k=2, h=2, variant=Variant.THEORY, delta=0.1, sampling_mode=SamplingMode.WITHOUT_REPLACEMENT)
    search = AdaptiveKNN(data, query, cfg)
    search.run()
    for i in np.flatnonzero(search.count == 16):
        assert search.est[i] == exact_distance(query.coords, data.points[i])
        assert search.alpha[i] == 0.0


@pytest.mark.parametrize("mode", list(SamplingMode))
def test_termination_and_accounting_invariants(mode):
    data, query = generate_subspace(SubspaceSpec(n=80, m=64, p=4, seed=7))
    n, m = data.n, data.m
    search = AdaptiveKNN(data, query, RunConfig(k=5, h=3, sampling_mode=mode, variant=Variant.THEORY, delta=0.1))
    last = search.stats[EVALS]
    while search.step() is TerminationStatus.RUNNING:
        assert search.stats[EVALS] >= last
        last = search.stats[EVALS]
    report = search.report()
    assert max(report.per_arm_counts) <= m
    charge = m * report.exact_arm_count if mode is SamplingMode.WITH_REPLACEMENT else 0
    assert report.total_coordinate_evals == sum(report.per_arm_counts) + charge
    assert report.total_coordinate_evals <= n * m + charge
    assert len(report.result_set) == 8
    assert search.bank.check() == []


def test_result_contains_exact_answer_when_everything_exact():
    data, query = random_instance(30, 4, seed=8)
    report = run(data, query, RunConfig(k=4, h=2, variant=Variant.THEORY, delta=0.1))
    assert brute_force(data, query, 4).k_set <= set(report.result_set)


def test_determinism():
    data, query = generate_subspace(SubspaceSpec(n=200, m=512, p=5, seed=9))
    cfg = RunConfig(k=10, h=10, c_alpha=0.1, seed=42)
    a, b = run(data, query, cfg), run(data, query, cfg)
    assert same_report(a, b)
    c = run(data, query, RunConfig(k=10, h=10, c_alpha=0.1, seed=43))
    assert c.per_arm_counts != a.per_arm_counts


def test_degenerate_returns_everything():
    data, query = random_instance(5, 10)
    report = run(data, query, RunConfig(k=3, h=2))
    assert report.degenerate and report.result_set == [0, 1, 2, 3, 4]
    assert report.total_coordinate_evals == 0


def test_dimension_mismatch():
    data, _ = random_instance(5, 10)
    with pytest.raises(DimensionError):
        run(data, Query(np.zeros(9)), RunConfig(k=1))


def test_iteration_cap_reports_partial_state():
    data, query = generate_subspace(SubspaceSpec(n=100, m=512, p=5, seed=1))
    with pytest.raises(IterationLimitExceeded) as info:
        run(data, query, RunConfig(k=5, h=5, variant=Variant.THEORY, max_iterations=10))
    assert info.value.report.iterations == 10
    assert not info.value.report.terminated


def test_report_json_round_trip():
    import json

    data, query = random_instance(20, 32, seed=3)
    report = run(data, query, RunConfig(k=2, h=2))
    doc = json.loads(report.to_json())
    assert doc["result_set"] == report.result_set
    assert doc["sample_fraction"] == report.sample_fraction
    assert "wall_time" not in report.to_dict(timing=False)
