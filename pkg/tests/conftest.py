import numpy as np
import pytest

from adaptive_knn.core import Dataset, Query

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(name, passed, detail)."""

    def record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def random_instance(n, m, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-0.5, 0.5, size=(n, m))
    q = rng.uniform(-0.5, 0.5, size=m)
    return Dataset(X), Query(q)


def bernoulli_instance(distances, m, seed=0):
    """Query at -1/2 everywhere; point i has round(d_i * m) coordinates at +1/2.

    Every sampled squared difference is 0 or 1, so each arm is a Bernoulli arm
    with mean exactly round(d_i * m) / m.
    """
    rng = np.random.default_rng(seed)
    n = len(distances)
    X = np.full((n, m), -0.5)
    for i, d in enumerate(distances):
        ones = int(round(d * m))
        X[i, rng.choice(m, size=ones, replace=False)] = 0.5
    return Dataset(X), Query(np.full(m, -0.5))
