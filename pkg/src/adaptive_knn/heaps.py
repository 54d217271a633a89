"""Seven coupled addressable binary heaps over the close / mid / far partitions.

Each heap is a row of ``items`` (point indices in heap order) with a matching
row of ``pos`` (back-pointer from point index to slot, -1 when absent). Keys
are not stored; they are read from the shared ``est`` / ``alpha`` arrays, so an
arm update only needs a sift at its slot in each heap of its partition.

Ordering inside a heap is lexicographic on (signed key, signed index). The
estimate heaps use the plain (estimate, index) order, so the partitions always
agree with a full sort of (estimate, index) pairs. The selection heaps (upper
bound, lower bound, radius) break key ties toward the lower index.
"""

from __future__ import annotations

import numpy as np
from numba import njit

FAR_EST, FAR_LCB, MID_EST_MIN, MID_EST_MAX, MID_ALPHA, CLOSE_EST, CLOSE_UCB = range(7)
N_HEAPS = 7
HEAP_NAMES = ("far_est_min", "far_lcb_min", "mid_est_min", "mid_est_max", "mid_alpha_max", "close_est_max", "close_ucb_max")

FAR, MID, CLOSE = 0, 1, 2
# heaps of partition p are ids _FIRST[p] .. _FIRST[p + 1] - 1
_FIRST = (0, 2, 5, 7)

EST, LCB, UCB, ALPHA = 0, 1, 2, 3
_KIND = (EST, LCB, EST, EST, ALPHA, EST, UCB)
_KEY_SIGN = (1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0)
_IDX_SIGN = (1, 1, 1, -1, 1, -1, 1)


@njit(cache=True, nogil=True, inline="always")
def _key(kind, i, est, alpha):
    if kind == EST:
        return est[i]
    if kind == LCB:
        return est[i] - alpha[i]
    if kind == UCB:
        return est[i] + alpha[i]
    return alpha[i]


@njit(cache=True, nogil=True)
def _before(h, a, b, est, alpha):
    kind = _KIND[h]
    s = _KEY_SIGN[h]
    ka = s * _key(kind, a, est, alpha)
    kb = s * _key(kind, b, est, alpha)
    if ka < kb:
        return True
    if ka > kb:
        return False
    return _IDX_SIGN[h] * a < _IDX_SIGN[h] * b


@njit(cache=True, nogil=True)
def _sift_up(h, p, items, pos, est, alpha, moves):
    i = items[h, p]
    while p > 0:
        parent = (p - 1) >> 1
        j = items[h, parent]
        if not _before(h, i, j, est, alpha):
            break
        items[h, p] = j
        pos[h, j] = p
        moves[0] += 1
        p = parent
    items[h, p] = i
    pos[h, i] = p
    return p


@njit(cache=True, nogil=True)
def _sift_down(h, p, items, pos, size, est, alpha, moves):
    i = items[h, p]
    n = size[h]
    while True:
        c = 2 * p + 1
        if c >= n:
            break
        if c + 1 < n and _before(h, items[h, c + 1], items[h, c], est, alpha):
            c += 1
        j = items[h, c]
        if not _before(h, j, i, est, alpha):
            break
        items[h, p] = j
        pos[h, j] = p
        moves[0] += 1
        p = c
    items[h, p] = i
    pos[h, i] = p
    return p


@njit(cache=True, nogil=True)
def _fix(h, i, items, pos, size, est, alpha, moves):
    p = pos[h, i]
    if _sift_up(h, p, items, pos, est, alpha, moves) == p:
        _sift_down(h, p, items, pos, size, est, alpha, moves)


@njit(cache=True, nogil=True)
def _push(h, i, items, pos, size, est, alpha, moves):
    p = size[h]
    items[h, p] = i
    pos[h, i] = p
    size[h] = p + 1
    moves[0] += 1
    _sift_up(h, p, items, pos, est, alpha, moves)


@njit(cache=True, nogil=True)
def _remove(h, i, items, pos, size, est, alpha, moves):
    p = pos[h, i]
    last = size[h] - 1
    size[h] = last
    pos[h, i] = -1
    if p != last:
        j = items[h, last]
        items[h, p] = j
        pos[h, j] = p
        moves[0] += 1
        if _sift_up(h, p, items, pos, est, alpha, moves) == p:
            _sift_down(h, p, items, pos, size, est, alpha, moves)


@njit(cache=True, nogil=True)
def _heapify(h, items, pos, size, est, alpha, moves):
    for p in range(size[h]):
        pos[h, items[h, p]] = p
    for p in range(size[h] // 2 - 1, -1, -1):
        _sift_down(h, p, items, pos, size, est, alpha, moves)


@njit(cache=True, nogil=True)
def update_key(i, items, pos, size, part, est, alpha, moves):
    """Restore heap order in every heap of arm i's partition after its keys changed."""
    p = part[i]
    for h in range(_FIRST[p], _FIRST[p + 1]):
        _fix(h, i, items, pos, size, est, alpha, moves)


@njit(cache=True, nogil=True)
def _move(i, dest, items, pos, size, part, est, alpha, moves):
    src = part[i]
    for h in range(_FIRST[src], _FIRST[src + 1]):
        _remove(h, i, items, pos, size, est, alpha, moves)
    part[i] = dest
    for h in range(_FIRST[dest], _FIRST[dest + 1]):
        _push(h, i, items, pos, size, est, alpha, moves)


@njit(cache=True, nogil=True)
def _lex_greater(a, b, est):
    return est[a] > est[b] or (est[a] == est[b] and a > b)


@njit(cache=True, nogil=True)
def restore(hmid, items, pos, size, part, est, alpha, moves):
    """Swap boundary extremes between partitions until the estimate order holds.

    Each swap removes one inversion of the (estimate, index) order across a
    boundary, so the loop terminates. Returns the number of swaps.
    """
    swaps = 0
    while True:
        if hmid > 0:
            a = items[CLOSE_EST, 0]
            b = items[MID_EST_MIN, 0]
            if _lex_greater(a, b, est):
                _move(a, MID, items, pos, size, part, est, alpha, moves)
                _move(b, CLOSE, items, pos, size, part, est, alpha, moves)
                swaps += 1
                continue
            a = items[MID_EST_MAX, 0]
        else:
            a = items[CLOSE_EST, 0]
        b = items[FAR_EST, 0]
        if _lex_greater(a, b, est):
            dest = part[a]
            _move(a, FAR, items, pos, size, part, est, alpha, moves)
            _move(b, dest, items, pos, size, part, est, alpha, moves)
            swaps += 1
            continue
        return swaps


@njit(cache=True, nogil=True)
def select_d1(items):
    return items[CLOSE_UCB, 0]


@njit(cache=True, nogil=True)
def select_d2(items):
    return items[FAR_LCB, 0]


@njit(cache=True, nogil=True)
def select_b2(items, size, alpha):
    d2 = items[FAR_LCB, 0]
    if size[MID_ALPHA] == 0:
        return d2
    m2 = items[MID_ALPHA, 0]
    if alpha[m2] > alpha[d2]:
        return m2
    return d2


def smallest_mask(values: np.ndarray, r: int) -> np.ndarray:
    """Mask of the r smallest entries by (value, index), in linear time."""
    mask = np.zeros(values.shape[0], dtype=bool)
    if r <= 0:
        return mask
    if r >= values.shape[0]:
        mask[:] = True
        return mask
    v = np.partition(values, r - 1)[r - 1]
    mask = values < v
    need = r - int(mask.sum())
    mask[np.flatnonzero(values == v)[:need]] = True
    return mask


class HeapBank:
    """Partition of n arms into close (k), mid (h) and far (n - k - h) sets.

    ``est`` and ``alpha`` are held by reference; callers that mutate them must
    follow up with :meth:`update_arm` (or call it with the new values).
    """

    def __init__(self, est, alpha, k: int, h: int):
        est = np.asarray(est, dtype=np.float64)
        alpha = np.asarray(alpha, dtype=np.float64)
        n = est.shape[0]
        if alpha.shape != est.shape:
            raise ValueError("estimates and radii must have the same length")
        if k < 1 or h < 0:
            raise ValueError(f"need k >= 1 and h >= 0, got k={k}, h={h}")
        if k + h >= n:
            raise ValueError(f"k + h = {k + h} must be smaller than n = {n}")
        self.n, self.k, self.h = n, k, h
        self.est = est
        self.alpha = alpha
        self.items = np.full((N_HEAPS, n), -1, dtype=np.int64)
        self.pos = np.full((N_HEAPS, n), -1, dtype=np.int64)
        self.size = np.zeros(N_HEAPS, dtype=np.int64)
        self.part = np.full(n, FAR, dtype=np.int64)
        self.moves = np.zeros(1, dtype=np.int64)

        close = smallest_mask(est, k)
        near = smallest_mask(est, k + h)
        self.part[near] = MID
        self.part[close] = CLOSE
        for p in (FAR, MID, CLOSE):
            members = np.flatnonzero(self.part == p)
            for hid in range(_FIRST[p], _FIRST[p + 1]):
                self.items[hid, : members.size] = members
                self.size[hid] = members.size
                _heapify(hid, self.items, self.pos, self.size, self.est, self.alpha, self.moves)

    @classmethod
    def from_states(cls, states, k: int, h: int) -> "HeapBank":
        est = np.array([s.estimate for s in states], dtype=np.float64)
        alpha = np.array([0.0 if s.exact else s.alpha for s in states], dtype=np.float64)
        return cls(est, alpha, k, h)

    def peek_d1(self) -> int:
        return int(select_d1(self.items))

    def peek_d2(self) -> int:
        return int(select_d2(self.items))

    def peek_b2(self) -> int:
        return int(select_b2(self.items, self.size, self.alpha))

    def update_arm(self, index: int, estimate: float | None = None, alpha: float | None = None) -> None:
        if not 0 <= index < self.n:
            raise IndexError(f"unknown arm index {index}")
        if estimate is not None:
            self.est[index] = estimate
        if alpha is not None:
            self.alpha[index] = alpha
        update_key(index, self.items, self.pos, self.size, self.part, self.est, self.alpha, self.moves)

    def restore_ordering(self) -> int:
        return int(restore(self.h, self.items, self.pos, self.size, self.part, self.est, self.alpha, self.moves))

    def members(self, partition: int) -> np.ndarray:
        return np.flatnonzero(self.part == partition)

    def partitions(self) -> tuple[set[int], set[int], set[int]]:
        """(close, mid, far) as sets of point indices."""
        return tuple(set(self.members(p).tolist()) for p in (CLOSE, MID, FAR))

    def heap(self, hid: int) -> np.ndarray:
        return self.items[hid, : self.size[hid]].copy()

    def check(self) -> list[str]:
        """Independent consistency audit; returns a list of violations (empty when valid)."""
        problems = []
        sizes = {FAR: self.n - self.k - self.h, MID: self.h, CLOSE: self.k}
        for p, expected in sizes.items():
            got = int((self.part == p).sum())
            if got != expected:
                problems.append(f"partition {p} has {got} members, expected {expected}")
        keys = {
            EST: self.est,
            LCB: self.est - self.alpha,
            UCB: self.est + self.alpha,
            ALPHA: self.alpha,
        }
        for hid in range(N_HEAPS):
            part_of = FAR if hid < _FIRST[1] else MID if hid < _FIRST[2] else CLOSE
            heap = self.heap(hid)
            if sorted(heap.tolist()) != self.members(part_of).tolist():
                problems.append(f"{HEAP_NAMES[hid]} does not hold exactly its partition")
            if np.any(self.pos[hid, heap] != np.arange(heap.size)):
                problems.append(f"{HEAP_NAMES[hid]} back-pointers are stale")
            outside = np.setdiff1d(np.arange(self.n), heap)
            if np.any(self.pos[hid, outside] != -1):
                problems.append(f"{HEAP_NAMES[hid]} has back-pointers for absent arms")
            if heap.size < 2:
                continue
            child = heap[1:]
            parent = heap[(np.arange(1, heap.size) - 1) // 2]
            key = _KEY_SIGN[hid] * keys[_KIND[hid]]
            kp, kc = key[parent], key[child]
            ok = (kp < kc) | ((kp == kc) & (_IDX_SIGN[hid] * parent < _IDX_SIGN[hid] * child))
            if not ok.all():
                problems.append(f"{HEAP_NAMES[hid]} violates heap order at {int((~ok).sum())} edges")
        close, mid, far = (self.members(p) for p in (CLOSE, MID, FAR))
        order = []
        for block in (close, mid, far):
            if block.size:
                order.append(block)
        for lo, hi in zip(order, order[1:]):
            lo_max = max(zip(self.est[lo], lo))
            hi_min = min(zip(self.est[hi], hi))
            if lo_max > hi_min:
                problems.append(f"partition order violated: {lo_max} > {hi_min}")
        return problems
