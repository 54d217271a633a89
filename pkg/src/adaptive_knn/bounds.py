"""Instance-dependent complexity scores computed from a sorted distance profile.

Indices in the formulas below are 1-based ranks into the sorted distances;
``d(r)`` is ``sorted_distances[r - 1]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ConfidenceSpec, Variant, alpha_fn

SEARCH_LIMIT = 10**9


@dataclass(frozen=True, eq=False)
class GapProfile:
    sorted_distances: np.ndarray
    k: int
    h: int
    m: int

    def __post_init__(self):
        d = np.array(self.sorted_distances, dtype=np.float64, copy=True)
        if d.ndim != 1 or d.size < 2:
            raise ValueError("need at least two distances")
        if np.any(np.diff(d) < 0):
            raise ValueError("distances must be sorted nondecreasingly")
        if d[0] < 0 or d[-1] > 1:
            raise ValueError("normalized distances must lie in [0, 1]")
        if self.k < 1 or self.h < 0 or self.m < 1:
            raise ValueError("need k >= 1, h >= 0, m >= 1")
        d.setflags(write=False)
        object.__setattr__(self, "sorted_distances", d)

    @classmethod
    def from_distances(cls, distances, k: int, h: int, m: int) -> "GapProfile":
        return cls(np.sort(np.asarray(distances, dtype=np.float64)), k, h, m)

    @property
    def n(self) -> int:
        return self.sorted_distances.size

    def d(self, rank: int) -> float:
        return float(self.sorted_distances[rank - 1])


def _capped_inv_sq(gap, m: int):
    gap = np.abs(np.asarray(gap, dtype=np.float64))
    with np.errstate(divide="ignore"):
        inv = np.where(gap > 0, 1.0 / np.where(gap > 0, gap, 1.0) ** 2, np.inf)
    return np.minimum(inv, m)


def upper_score(profile: GapProfile) -> float:
    """Bracketed sum of the upper complexity bound, without its hidden log factors.

    sum_{i<=k} min(D(i,k+1+h)^-2, m) + sum_{i>=k+1+h} min(D(k,i)^-2, m) + h min(D(k,k+1+h)^-2, m)
    """
    k, h, m, n = profile.k, profile.h, profile.m, profile.n
    if k + h >= n:
        raise ValueError(f"k + h = {k + h} must be smaller than n = {n}")
    d = profile.sorted_distances
    pivot = d[k + h]
    close = _capped_inv_sq(d[:k] - pivot, m).sum()
    far = _capped_inv_sq(d[k - 1] - d[k + h:], m).sum()
    mid = h * _capped_inv_sq(d[k - 1] - pivot, m)
    return float(close + far + mid)


def lower_bound_constant(profile: GapProfile, delta: float) -> float:
    lo, hi = profile.d(profile.k - profile.h), profile.d(profile.k + 1 + profile.h)
    return math.log(1.0 / (2.0 * delta)) * min(lo * (1 - lo), hi * (1 - hi))


def lower_bound(profile: GapProfile, delta: float) -> float:
    """Expected-sample lower bound for uniformly sampling algorithms.

    Returns ``math.inf`` when a gap in the sums is zero (tied boundary; the
    bound is vacuous there).
    """
    k, h = profile.k, profile.h
    if h >= k:
        raise ValueError(f"the lower bound needs h < k, got h={h}, k={k}")
    if not 0.0 < delta <= 0.14:
        raise ValueError(f"delta must lie in (0, 0.14], got {delta}")
    if k + h >= profile.n:
        raise ValueError(f"k + h = {k + h} must be smaller than n = {profile.n}")
    c = lower_bound_constant(profile, delta)
    if c == 0.0:
        return 0.0
    d = profile.sorted_distances
    gaps = np.concatenate([d[: k - h] - d[k + h], d[k - h - 1] - d[k + h:]])
    if np.any(gaps == 0):
        return math.inf
    return float(c * np.sum(1.0 / gaps**2))


def min_samples_for_gap(gap: float, spec: ConfidenceSpec, limit: int = SEARCH_LIMIT) -> int | None:
    """Smallest u >= 1 with alpha(u) <= gap / 8, or None if no u <= limit qualifies.

    Doubling locates a bracket alpha(lo) > gap/8 >= alpha(hi); bisection then
    keeps that invariant, so the answer satisfies alpha(u) <= gap/8 < alpha(u-1).
    The radius is decreasing for u >= 1 in both variants, which makes the
    bracket's lower end the first crossing.
    """
    if not gap > 0:
        raise ValueError(f"gap must be positive, got {gap}")
    target = gap / 8.0
    if alpha_fn(1, spec) <= target:
        return 1
    lo, hi = 1, 2
    while alpha_fn(hi, spec) > target:
        lo, hi = hi, 2 * hi
        if lo >= limit:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if alpha_fn(mid, spec) <= target:
            hi = mid
        else:
            lo = mid
    return hi if hi <= limit else None


C1 = 128.0 / (1.0 - 2.0 / math.log(1.12 * 32.0))
C2 = C1 + 1.0


def fixed_point_bound(gap: float, n: int, delta: float) -> float:
    """Explicit ceiling on min_samples_for_gap for the theory radius.

    c2 / gap^2 * log(125 (n/delta) log(1.12 * 128 / gap^2)), with
    c2 = 128 / (1 - 2 / log(35.84)) + 1.
    """
    return C2 / gap**2 * math.log(125.0 * n / delta * math.log(1.12 * 128.0 / gap**2))


def arm_gaps(profile: GapProfile) -> np.ndarray:
    """Per-rank gap that an arm must resolve: to d(k+1+h) for close ranks,
    to d(k) for far ranks, and d(k+1+h) - d(k) for the h middle ranks."""
    k, h = profile.k, profile.h
    d = profile.sorted_distances
    gaps = np.full(profile.n, d[k + h] - d[k - 1])
    gaps[:k] = d[k + h] - d[:k]
    gaps[k + h:] = d[k + h:] - d[k - 1]
    return gaps


@dataclass
class ComplexityReport:
    upper_score: float
    lower_bound: float | None
    lower_bound_vacuous: bool
    per_arm_fixed_points: list[int]
    fact2_bound_ok: bool | None

    def to_dict(self) -> dict:
        return asdict(self)


def complexity_report(profile: GapProfile, spec: ConfidenceSpec) -> ComplexityReport:
    """All scores for one profile. ``lower_bound`` is None outside its domain
    (h >= k or delta > 0.14); fixed points are capped at m, where an arm is
    computed exactly."""
    lb = None
    if profile.h < profile.k and spec.delta <= 0.14:
        lb = lower_bound(profile, spec.delta)
    fixed, ok = [], spec.variant is Variant.THEORY
    for g in arm_gaps(profile):
        u = min_samples_for_gap(g, spec) if g > 0 else None
        fixed.append(profile.m if u is None else min(u, profile.m))
        if ok and g > 0 and (u is None or u > fixed_point_bound(g, spec.n, spec.delta)):
            ok = False
    return ComplexityReport(
        upper_score=upper_score(profile),
        lower_bound=lb,
        lower_bound_vacuous=lb is not None and math.isinf(lb),
        per_arm_fixed_points=fixed,
        fact2_bound_ok=ok if spec.variant is Variant.THEORY else None,
    )


def bound_relation_check(profile: GapProfile, delta: float) -> dict:
    """Upper score at approximation 2h next to the lower bound at h.

    Meaningful when d(k-h) == d(k); no ratio is asserted since the hidden
    constant is unknown.
    """
    wide = GapProfile(profile.sorted_distances, profile.k, 2 * profile.h, profile.m)
    upper = upper_score(wide)
    lower = lower_bound(profile, delta)
    return {
        "upper_score_2h": upper,
        "lower_bound_h": lower,
        "lower_bound_vacuous": math.isinf(lower),
        "tied_at_k": profile.d(profile.k - profile.h) == profile.d(profile.k),
    }
