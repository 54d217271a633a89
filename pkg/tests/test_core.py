import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_knn.core import (
    ArmSampler,
    ArmState,
    ConfidenceSpec,
    ConfigurationError,
    Dataset,
    DimensionError,
    Query,
    SamplingMode,
    Variant,
    alpha_fn,
    exact_distance,
    sample_coordinate,
    update_estimate,
)

EXP = ConfidenceSpec(Variant.EXPERIMENTAL, delta=0.001, n=1000, c_alpha=1.0)
THEORY = ConfidenceSpec(Variant.THEORY, delta=0.001, n=1000)


def naive_distance(x, xi):
    total = 0.0
    for a, b in zip(x, xi):
        total += (b - a) * (b - a)
    return total / len(x)


def test_exact_distance_identity():
    x = np.linspace(-0.5, 0.5, 7)
    assert exact_distance(x, x) == 0.0


def test_exact_distance_maximal():
    assert exact_distance([-0.5] * 4, [0.5] * 4) == 1.0


def test_exact_distance_matches_naive_sum():
    x, xi = (0.1, -0.2, 0.3), (-0.1, 0.2, 0.0)
    expected = naive_distance(x, xi)
    assert expected == pytest.approx(0.29 / 3, rel=1e-14)
    assert exact_distance(x, xi) == pytest.approx(expected, rel=1e-15)


def test_exact_distance_length_mismatch():
    with pytest.raises(DimensionError):
        exact_distance([0.0, 0.1], [0.0])


def test_dataset_rejects_unnormalized():
    with pytest.raises(ValueError):
        Dataset([[0.6, 0.0]])
    with pytest.raises(ValueError):
        Query([0.0, -0.51])


def test_dataset_is_read_only():
    data = Dataset([[0.1, 0.2], [0.0, 0.0]])
    with pytest.raises(ValueError):
        data.points[0, 0] = 0.3


def test_update_estimate_running_mean():
    s = update_estimate(ArmState(estimate=0.5, count=1), 0.0, EXP)
    assert s.estimate == 0.25 and s.count == 2
    assert s.alpha == alpha_fn(2, EXP)


def test_update_estimate_zero_fixed_point():
    s = update_estimate(ArmState(estimate=0.0, count=3), 0.0, EXP)
    assert s.estimate == 0.0 and s.count == 4


def test_update_estimate_sequence():
    samples = [0.2, 0.4, 0.9]
    s = ArmState()
    for v in samples:
        s = update_estimate(s, v, EXP)
    assert s.count == 3
    assert s.estimate == pytest.approx(sum(samples) / len(samples), rel=1e-15)


def test_update_estimate_on_exact_arm():
    with pytest.raises(RuntimeError):
        update_estimate(ArmState(estimate=0.3, count=5, alpha=0.0, exact=True), 0.1, EXP)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=200))
def test_estimate_stays_in_unit_interval(samples):
    s = ArmState()
    for v in samples:
        s = update_estimate(s, v, EXP)
        assert 0.0 <= s.estimate <= 1.0
    assert s.alpha > 0


def test_alpha_experimental_value():
    expected = math.sqrt(math.log(1 + 1e6))
    assert alpha_fn(1, EXP) == pytest.approx(expected, rel=1e-12)
    assert alpha_fn(1, EXP) == pytest.approx(3.7169, abs=1e-4)


def test_alpha_theory_value():
    expected = math.sqrt(2 * (math.log(1e6) + 3 * math.log(math.log(1e6))))
    assert alpha_fn(1, THEORY) == pytest.approx(expected, rel=1e-12)
    assert alpha_fn(1, THEORY) == pytest.approx(6.587, abs=1e-3)


@pytest.mark.parametrize(
    "spec",
    [EXP, THEORY, ConfidenceSpec(Variant.EXPERIMENTAL, 0.05, 20, 0.01), ConfidenceSpec(Variant.THEORY, 0.1, 2)],
)
def test_alpha_shrinks(spec):
    u = np.unique(np.geomspace(8, 1e8, 200).astype(int))
    a = np.array([alpha_fn(int(v), spec) for v in u])
    a4 = np.array([alpha_fn(int(4 * v), spec) for v in u])
    assert np.all(a4 < a)
    assert np.all(a > 0)
    # sqrt(u) * alpha(u) grows no faster than a log
    assert a[-1] * math.sqrt(u[-1]) < 3 * a[0] * math.sqrt(u[0])


def test_alpha_table_matches_scalar():
    table = THEORY.table(50)
    assert math.isinf(table[0])
    for u in (1, 2, 17, 50):
        assert table[u] == pytest.approx(alpha_fn(u, THEORY), rel=1e-14)


def test_theory_rejects_large_delta_over_n():
    with pytest.raises(ConfigurationError):
        ConfidenceSpec(Variant.THEORY, delta=0.5, n=1)
    ConfidenceSpec(Variant.EXPERIMENTAL, delta=0.5, n=1)


@pytest.mark.parametrize("kwargs", [dict(delta=0.0), dict(delta=1.0), dict(c_alpha=0.0)])
def test_confidence_spec_validation(kwargs):
    with pytest.raises(ConfigurationError):
        ConfidenceSpec(**kwargs)


@pytest.mark.parametrize("mode", list(SamplingMode))
def test_single_coordinate(mode):
    sampler = ArmSampler(3, 1, seed=5, mode=mode)
    assert sample_coordinate(sampler, 0) == 0
    if mode is SamplingMode.WITH_REPLACEMENT:
        assert all(sampler.draw(1) == 0 for _ in range(20))


def test_without_replacement_is_a_permutation():
    sampler = ArmSampler(4, 5, seed=11, mode=SamplingMode.WITHOUT_REPLACEMENT)
    for arm in range(4):
        assert sorted(sampler.draw(arm) for _ in range(5)) == [0, 1, 2, 3, 4]
    with pytest.raises(IndexError):
        sampler.draw(0)


def test_with_replacement_frequencies():
    sampler = ArmSampler(1, 10, seed=2024)
    draws = np.array([sampler.draw(0) for _ in range(10**5)])
    counts = np.bincount(draws, minlength=10)
    sigma = math.sqrt(10**5 * 0.1 * 0.9)
    assert np.all(np.abs(counts - 10**4) < 5 * sigma)


def test_streams_do_not_depend_on_interleaving():
    a = ArmSampler(3, 1000, seed=9)
    b = ArmSampler(3, 1000, seed=9)
    seq_a = [a.draw(0) for _ in range(50)] + [a.draw(2) for _ in range(50)]
    interleaved = []
    for _ in range(50):
        interleaved.append((b.draw(2), b.draw(0)))
    assert seq_a[:50] == [p[1] for p in interleaved]
    assert seq_a[50:] == [p[0] for p in interleaved]


def test_sampled_squared_difference_is_unbiased():
    rng = np.random.default_rng(3)
    m = 257
    x, xi = rng.uniform(-0.5, 0.5, m), rng.uniform(-0.5, 0.5, m)
    sampler = ArmSampler(1, m, seed=77)
    idx = np.array([sampler.draw(0) for _ in range(10**5)])
    mean = np.mean((xi[idx] - x[idx]) ** 2)
    assert abs(mean - exact_distance(x, xi)) <= 5 * math.sqrt(1 / (4 * 10**5))


def test_without_replacement_full_pass_recovers_distance():
    rng = np.random.default_rng(4)
    m = 64
    x, xi = rng.uniform(-0.5, 0.5, m), rng.uniform(-0.5, 0.5, m)
    sampler = ArmSampler(1, m, seed=1, mode=SamplingMode.WITHOUT_REPLACEMENT)
    s = ArmState()
    for _ in range(m):
        j = sampler.draw(0)
        s = update_estimate(s, (xi[j] - x[j]) ** 2, EXP)
    assert s.estimate == pytest.approx(exact_distance(x, xi), rel=1e-12)
