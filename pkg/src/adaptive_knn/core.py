"""Distances, running estimates, confidence radii and per-arm coordinate sampling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numba import njit


class DimensionError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


class Variant(str, enum.Enum):
    THEORY = "theory"
    EXPERIMENTAL = "experimental"


class SamplingMode(str, enum.Enum):
    WITH_REPLACEMENT = "with-replacement"
    WITHOUT_REPLACEMENT = "without-replacement"


# integer codes used inside compiled kernels
WITH_REPLACEMENT = 0
WITHOUT_REPLACEMENT = 1


def mode_code(mode: SamplingMode) -> int:
    return WITH_REPLACEMENT if SamplingMode(mode) is SamplingMode.WITH_REPLACEMENT else WITHOUT_REPLACEMENT


def _check_bounded(arr: np.ndarray, what: str) -> None:
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    if arr.size and np.abs(arr).max() > 0.5:
        raise ValueError(f"{what} is not normalized: max |coordinate| = {np.abs(arr).max()!r} > 1/2")


@dataclass(frozen=True, eq=False)
class Dataset:
    """n points in m dimensions with every coordinate in [-1/2, 1/2].

    The point matrix is copied and made read-only on construction.
    """

    points: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionError(f"points must be a non-empty n x m matrix, got shape {pts.shape}")
        _check_bounded(pts, "dataset")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class Query:
    coords: np.ndarray

    def __post_init__(self):
        q = np.array(self.coords, dtype=np.float64, copy=True)
        if q.ndim != 1 or q.size < 1:
            raise DimensionError(f"query must be a non-empty vector, got shape {q.shape}")
        _check_bounded(q, "query")
        q.setflags(write=False)
        object.__setattr__(self, "coords", q)

    @property
    def m(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class ConfidenceSpec:
    """Parameters of the anytime confidence radius alpha(u).

    ``THEORY`` uses the law-of-iterated-logarithm radius with delta' = delta / n,
    ``EXPERIMENTAL`` the tunable radius scaled by ``c_alpha``.
    """

    variant: Variant = Variant.EXPERIMENTAL
    delta: float = 0.001
    n: int = 1000
    c_alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.n < 1:
            raise ConfigurationError(f"n must be positive, got {self.n}")
        if not self.c_alpha > 0.0:
            raise ConfigurationError(f"c_alpha must be positive, got {self.c_alpha}")
        if self.variant is Variant.THEORY and self.delta / self.n >= 1.0 / math.e:
            raise ConfigurationError(
                f"theory radius needs delta/n < 1/e (log log(n/delta) must be positive), got {self.delta / self.n}"
            )

    def alpha(self, u: int) -> float:
        return alpha_fn(u, self)

    def table(self, m: int) -> np.ndarray:
        """alpha(u) for u = 0..m; entry 0 is +inf (no samples yet)."""
        u = np.arange(1, m + 1, dtype=np.float64)
        out = np.empty(m + 1)
        out[0] = np.inf
        out[1:] = _alpha_array(u, self)
        return out


def _alpha_array(u: np.ndarray, spec: ConfidenceSpec) -> np.ndarray:
    if spec.variant is Variant.THEORY:
        inv = spec.n / spec.delta
        beta = math.log(inv) + 3.0 * math.log(math.log(inv)) + 1.5 * np.log1p(np.log(u))
        return np.sqrt(2.0 * beta / u)
    return np.sqrt(spec.c_alpha * np.log1p((1.0 + np.log(u)) * spec.n / spec.delta) / u)


def alpha_fn(u: int, spec: ConfidenceSpec) -> float:
    if u < 1:
        raise ValueError(f"alpha is defined for u >= 1, got {u}")
    return float(_alpha_array(np.float64(u), spec))


@njit(cache=True, nogil=True)
def sq_distance(x, xi):
    s = 0.0
    for j in range(x.shape[0]):
        d = xi[j] - x[j]
        s += d * d
    return s / x.shape[0]


def exact_distance(x, xi) -> float:
    """Normalized squared distance (1/m) * sum_j (xi_j - x_j)^2."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    if x.shape != xi.shape or x.ndim != 1:
        raise DimensionError(f"length mismatch: {x.shape} vs {xi.shape}")
    return float(sq_distance(x, xi))


@dataclass(frozen=True)
class ArmState:
    estimate: float = 0.0
    count: int = 0
    alpha: float = math.inf
    exact: bool = False


def update_estimate(state: ArmState, sample_sq_diff: float, spec: ConfidenceSpec) -> ArmState:
    if state.exact:
        raise RuntimeError("cannot sample an arm whose distance is already exact")
    if not 0.0 <= sample_sq_diff <= 1.0:
        raise ValueError(f"squared coordinate difference must lie in [0, 1], got {sample_sq_diff}")
    t = state.count + 1
    est = min((t - 1) / t * state.estimate + sample_sq_diff / t, 1.0)
    return replace(state, estimate=est, count=t, alpha=alpha_fn(t, spec))


# -- per-arm random streams ------------------------------------------------
#
# Arm i's t-th coordinate draw is a pure function of (key_i, t), so a run is
# reproducible no matter how draws of different arms interleave.

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _bounded(key, t, bound):
    """Uniform integer in [0, bound) from stream ``key`` at position ``t``."""
    b = np.uint64(bound)
    z = _mix64(key + np.uint64(t + 1) * _GOLDEN)
    # rejection keeps the modulo unbiased
    threshold = (np.uint64(0) - b) % b
    while z < threshold:
        z = _mix64(z + _GOLDEN)
    return np.int64(z % b)


@njit(cache=True, nogil=True)
def draw_index(i, t, m, mode, keys, perm):
    """Coordinate index for arm ``i`` that has already consumed ``t`` draws."""
    if mode == WITH_REPLACEMENT:
        return _bounded(keys[i], t, m)
    if t >= m:
        raise IndexError("arm has consumed every coordinate")
    if t == 0:
        for j in range(m):
            perm[i, j] = j
    r = t + _bounded(keys[i], t, m - t)
    tmp = perm[i, t]
    perm[i, t] = perm[i, r]
    perm[i, r] = tmp
    return np.int64(perm[i, t])


def arm_keys(seed: int, n: int) -> np.ndarray:
    """Independent 64-bit stream keys for n arms, derived from a master seed."""
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, 0x6B6E6E]).generate_state(n, np.uint64)


class ArmSampler:
    """Per-arm coordinate sampler with or without replacement."""

    def __init__(self, n: int, m: int, seed: int, mode: SamplingMode = SamplingMode.WITH_REPLACEMENT):
        self.n, self.m = n, m
        self.mode = SamplingMode(mode)
        self.keys = arm_keys(seed, n)
        self.draws = np.zeros(n, dtype=np.int64)
        if self.mode is SamplingMode.WITHOUT_REPLACEMENT:
            self.perm = np.zeros((n, m), dtype=np.int32)
        else:
            self.perm = np.zeros((1, 1), dtype=np.int32)

    def draw(self, i: int) -> int:
        if self.mode is SamplingMode.WITHOUT_REPLACEMENT and self.draws[i] >= self.m:
            raise IndexError(f"arm {i} has consumed all {self.m} coordinates")
        j = draw_index(i, self.draws[i], self.m, mode_code(self.mode), self.keys, self.perm)
        self.draws[i] += 1
        return int(j)


def sample_coordinate(sampler: ArmSampler, i: int) -> int:
    return sampler.draw(i)
