"""Adaptive k-NN search: LUCB-style sampling until close and far sets separate."""

from __future__ import annotations

import enum
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from . import heaps
from .core import (
    WITH_REPLACEMENT,
    ConfidenceSpec,
    ConfigurationError,
    Dataset,
    DimensionError,
    Query,
    SamplingMode,
    Variant,
    arm_keys,
    draw_index,
    mode_code,
    sq_distance,
)

# slots of the kernel's statistics vector
EVALS, ITERATIONS, EXACT_ARMS, MAX_STEP_MOVES = range(4)


class TerminationStatus(enum.Enum):
    RUNNING = "running"
    TERMINATED = "terminated"


class IterationLimitExceeded(RuntimeError):
    """Raised when ``max_iterations`` is hit; ``report`` holds the partial state."""

    def __init__(self, report: "RunReport"):
        super().__init__(f"iteration cap reached after {report.iterations} iterations")
        self.report = report


@dataclass(frozen=True)
class RunConfig:
    k: int
    h: int = 0
    delta: float = 0.001
    variant: Variant = Variant.EXPERIMENTAL
    c_alpha: float = 1.0
    sampling_mode: SamplingMode = SamplingMode.WITH_REPLACEMENT
    seed: int = 0
    max_iterations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "sampling_mode", SamplingMode(self.sampling_mode))
        if self.k < 1:
            raise ConfigurationError(f"k must be at least 1, got {self.k}")
        if self.h < 0:
            raise ConfigurationError(f"h must be nonnegative, got {self.h}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")

    def confidence(self, n: int) -> ConfidenceSpec:
        return ConfidenceSpec(self.variant, self.delta, n, self.c_alpha)


@dataclass
class RunReport:
    result_set: list[int]
    total_coordinate_evals: int
    iterations: int
    per_arm_counts: list[int]
    exact_arm_count: int
    n: int
    m: int
    wall_time: float = 0.0
    degenerate: bool = False
    terminated: bool = True
    heap_moves: int = 0
    max_step_moves: int = 0

    @property
    def sample_fraction(self) -> float:
        return accounting(self)

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        d["sample_fraction"] = self.sample_fraction
        if not timing:
            del d["wall_time"]
        return d

    def to_json(self, timing: bool = True, **kw) -> str:
        return json.dumps(self.to_dict(timing), **kw)


def accounting(report: RunReport) -> float:
    """Coordinate evaluations spent relative to the brute-force cost n * m."""
    return report.total_coordinate_evals / (report.n * report.m)


@njit(cache=True, nogil=True)
def _sample(l, X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, stats):
    m = q.shape[0]
    j = draw_index(l, count[l], m, mode, keys, perm)
    t = count[l] + 1
    count[l] = t
    d = X[l, j] - q[j]
    v = (t - 1) / t * est[l] + (d * d) / t
    est[l] = min(v, 1.0)
    stats[EVALS] += 1
    if t == m:
        est[l] = sq_distance(q, X[l])
        alpha[l] = 0.0
        exact[l] = True
        stats[EXACT_ARMS] += 1
        if mode == WITH_REPLACEMENT:
            stats[EVALS] += m
    else:
        alpha[l] = alpha_table[t]


@njit(cache=True, nogil=True)
def _initialize(X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, stats):
    for i in range(X.shape[0]):
        _sample(i, X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, stats)


@njit(cache=True, nogil=True)
def _terminated(items, est, alpha):
    d1 = heaps.select_d1(items)
    d2 = heaps.select_d2(items)
    return est[d1] + alpha[d1] <= est[d2] - alpha[d2]


@njit(cache=True, nogil=True)
def _step(X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, items, pos, size, part, moves, hmid, stats):
    before = moves[0]
    d1 = heaps.select_d1(items)
    b2 = heaps.select_b2(items, size, alpha)
    for l in (d1, b2):
        # exact arms carry no uncertainty; sampling them again is pointless
        if exact[l]:
            continue
        _sample(l, X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, stats)
        heaps.update_key(l, items, pos, size, part, est, alpha, moves)
    heaps.restore(hmid, items, pos, size, part, est, alpha, moves)
    stats[ITERATIONS] += 1
    if moves[0] - before > stats[MAX_STEP_MOVES]:
        stats[MAX_STEP_MOVES] = moves[0] - before
    return _terminated(items, est, alpha)


@njit(cache=True, nogil=True)
def _advance(max_steps, X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, items, pos, size, part, moves, hmid, stats):
    done = _terminated(items, est, alpha)
    steps = 0
    while not done and (max_steps < 0 or steps < max_steps):
        done = _step(X, q, est, count, alpha, exact, alpha_table, mode, keys, perm, items, pos, size, part, moves, hmid, stats)
        steps += 1
    return done


class AdaptiveKNN:
    """Mutable search state for one query; :meth:`run` drives it to termination."""

    def __init__(self, data: Dataset, query: Query, cfg: RunConfig):
        if query.m != data.m:
            raise DimensionError(f"query has {query.m} coordinates, dataset has {data.m}")
        self.data, self.query, self.cfg = data, query, cfg
        n, m = data.n, data.m
        self.n, self.m = n, m
        self.degenerate = cfg.k + cfg.h >= n
        self.stats = np.zeros(4, dtype=np.int64)
        self.count = np.zeros(n, dtype=np.int64)
        self.est = np.zeros(n)
        self.alpha = np.full(n, np.inf)
        self.exact = np.zeros(n, dtype=np.bool_)
        self._elapsed = 0.0
        self.init_moves = 0
        if self.degenerate:
            self.bank = None
            return
        self.spec = cfg.confidence(n)
        self.alpha_table = self.spec.table(m)
        self.mode = mode_code(cfg.sampling_mode)
        self.keys = arm_keys(cfg.seed, n)
        if self.mode == WITH_REPLACEMENT:
            self.perm = np.zeros((1, 1), dtype=np.int32)
        else:
            self.perm = np.zeros((n, m), dtype=np.int32)
        t0 = time.perf_counter()
        _initialize(data.points, query.coords, self.est, self.count, self.alpha, self.exact,
                    self.alpha_table, self.mode, self.keys, self.perm, self.stats)
        self.bank = heaps.HeapBank(self.est, self.alpha, cfg.k, cfg.h)
        self.init_moves = int(self.bank.moves[0])
        self._elapsed += time.perf_counter() - t0

    def _kernel_args(self):
        b = self.bank
        return (self.data.points, self.query.coords, self.est, self.count, self.alpha, self.exact,
                self.alpha_table, self.mode, self.keys, self.perm,
                b.items, b.pos, b.size, b.part, b.moves, self.cfg.h, self.stats)

    @property
    def terminated(self) -> bool:
        if self.bank is None:
            return True
        return bool(_terminated(self.bank.items, self.est, self.alpha))

    def step(self) -> TerminationStatus:
        """One iteration: sample d1 and b2, repair the heaps, test termination."""
        if self.terminated:
            return TerminationStatus.TERMINATED
        t0 = time.perf_counter()
        done = _step(*self._kernel_args())
        self._elapsed += time.perf_counter() - t0
        return TerminationStatus.TERMINATED if done else TerminationStatus.RUNNING

    def advance(self, max_steps: int | None = None) -> bool:
        """Iterate until termination or ``max_steps`` iterations; True if terminated."""
        if self.bank is None:
            return True
        t0 = time.perf_counter()
        done = _advance(-1 if max_steps is None else int(max_steps), *self._kernel_args())
        self._elapsed += time.perf_counter() - t0
        return bool(done)

    def result_set(self) -> list[int]:
        if self.bank is None:
            return list(range(self.n))
        return sorted(np.flatnonzero(self.bank.part != heaps.FAR).tolist())

    def report(self) -> RunReport:
        moves = 0 if self.bank is None else int(self.bank.moves[0]) - self.init_moves
        return RunReport(
            result_set=self.result_set(),
            total_coordinate_evals=int(self.stats[EVALS]),
            iterations=int(self.stats[ITERATIONS]),
            per_arm_counts=self.count.tolist(),
            exact_arm_count=int(self.stats[EXACT_ARMS]),
            n=self.n,
            m=self.m,
            wall_time=self._elapsed,
            degenerate=self.degenerate,
            terminated=self.terminated,
            heap_moves=moves,
            max_step_moves=int(self.stats[MAX_STEP_MOVES]),
        )

    def run(self) -> RunReport:
        done = self.advance(self.cfg.max_iterations)
        report = self.report()
        if not done:
            raise IterationLimitExceeded(report)
        return report


def run(data: Dataset, query: Query, cfg: RunConfig) -> RunReport:
    """Return a (k + h)-subset that contains the k nearest neighbours w.p. >= 1 - delta."""
    return AdaptiveKNN(data, query, cfg).run()
