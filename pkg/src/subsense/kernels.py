"""Average-linkage merge kernels.

The merge loop dominates pipeline runtime (O(n^3) over up to a few thousand
representatives per target), so it ships in two interchangeable flavors: a
numba @njit kernel and a vectorized numpy fallback. Set ``SUBSENSE_NO_NUMBA=1``
to force the fallback. Both paths apply the identical rule: repeatedly merge
the active cluster pair with minimal average distance, breaking exact ties by
the lexicographically smallest (creation id, creation id) pair, where original
rows carry ids 0..n-1 and the t-th merge creates id n+t. Merged distances
follow the unweighted group-average update
``d(A+B, C) = (|A| d(A,C) + |B| d(B,C)) / (|A| + |B|)``, which both paths
evaluate with the same operand order, so their partitions match exactly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("SUBSENSE_NO_NUMBA", "") not in ("1", "true", "yes")


@njit(cache=True, nogil=True)
def _merge_numba(M, target):
    n = M.shape[0]
    active = np.ones(n, np.bool_)
    cid = np.arange(n)
    size = np.ones(n, np.int64)
    row_slot = np.arange(n)
    next_id = n
    n_active = n
    while n_active > target:
        best_d = np.inf
        best_lo = -1
        best_hi = -1
        bi = -1
        bj = -1
        for p in range(n):
            if not active[p]:
                continue
            for q in range(p + 1, n):
                if not active[q]:
                    continue
                d = M[p, q]
                if d > best_d:
                    continue
                a = cid[p]
                b = cid[q]
                lo = a if a < b else b
                hi = b if a < b else a
                if d < best_d or lo < best_lo or (lo == best_lo and hi < best_hi):
                    best_d = d
                    best_lo = lo
                    best_hi = hi
                    if a < b:
                        bi = p
                        bj = q
                    else:
                        bi = q
                        bj = p
        # merge bj (higher creation id) into bi
        s_lo = size[bi]
        s_hi = size[bj]
        s = s_lo + s_hi
        for r in range(n):
            if active[r] and r != bi and r != bj:
                nd = (s_lo * M[bi, r] + s_hi * M[bj, r]) / s
                M[bi, r] = nd
                M[r, bi] = nd
        active[bj] = False
        size[bi] = s
        cid[bi] = next_id
        next_id += 1
        for r in range(n):
            if row_slot[r] == bj:
                row_slot[r] = bi
        n_active -= 1
    return row_slot


def _merge_numpy(M, target):
    n = M.shape[0]
    active = np.ones(n, bool)
    cid = np.arange(n)
    size = np.ones(n, np.int64)
    row_slot = np.arange(n)
    next_id = n
    n_active = n
    np.fill_diagonal(M, np.inf)
    while n_active > target:
        best_d = M.min()
        # resolve exact ties by smallest (creation id, creation id) pair
        best_lo = best_hi = None
        bi = bj = -1
        for p, q in np.argwhere(M == best_d):
            if p >= q:
                continue
            a, b = int(cid[p]), int(cid[q])
            lo, hi = (a, b) if a < b else (b, a)
            if best_lo is None or (lo, hi) < (best_lo, best_hi):
                best_lo, best_hi = lo, hi
                bi, bj = (p, q) if a < b else (q, p)
        s_lo = size[bi]
        s_hi = size[bj]
        row = (s_lo * M[bi, :] + s_hi * M[bj, :]) / (s_lo + s_hi)
        M[bi, :] = row
        M[:, bi] = row
        M[bi, bi] = np.inf
        M[bj, :] = np.inf
        M[:, bj] = np.inf
        active[bj] = False
        size[bi] = s_lo + s_hi
        cid[bi] = next_id
        next_id += 1
        row_slot[row_slot == bj] = bi
        n_active -= 1
    return row_slot


def merge_to_slots(distances: np.ndarray, target: int) -> np.ndarray:
    """Run the agglomeration on a square distance matrix and return the slot
    index of each original row; rows sharing a slot form one cluster.

    The matrix is consumed (modified in place).
    """
    M = np.ascontiguousarray(distances, dtype=np.float64)
    if numba_enabled():
        return np.asarray(_merge_numba(M, target))
    return _merge_numpy(M, target)
