"""Compiled single-pass kernels over similarity blocks, plus the keyed uniform stream.

Stochastic keep decisions come from a counter-based generator: the uniform
for query ``i`` and candidate ``j`` under ``key`` is a SplitMix64 hash of
``(key, i, j)``. Decisions are therefore independent of block layout and
evaluation order, and the kernels only draw a uniform for candidates that
would beat the current best kept score.
"""

import numpy as np
from numba import njit

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def _mix_int(z):
    z = ((z ^ (z >> 30)) * _M1) & _MASK64
    z = ((z ^ (z >> 27)) * _M2) & _MASK64
    return z ^ (z >> 31)


def key_base(key):
    """Fold a tuple of non-negative integers into a 64-bit stream base."""
    h = 0
    for x in key:
        x = int(x)
        if x < 0:
            raise ValueError("stream key entries must be non-negative")
        h = _mix_int((h + _GOLDEN * (x + 1)) & _MASK64)
    return h


def keyed_uniform(key, rows, n_cols):
    """Uniforms in [0, 1) for the given query rows and all ``n_cols`` candidates."""
    base = np.uint64(key_base(key))
    rows = np.asarray(rows, dtype=np.uint64)
    c = (rows[:, None] << np.uint64(32)) | np.arange(n_cols, dtype=np.uint64)[None, :]
    z = base + c * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT


@njit(inline="always")
def _uniform(base, i, j):
    c = (np.uint64(i) << np.uint64(32)) | np.uint64(j)
    z = base + c * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return np.float64(z >> np.uint64(11)) * _TO_UNIT


@njit(cache=True)
def row_topk_sum(sim, k, out):
    """``out[i]`` = sum of the ``k`` largest entries of row ``i``."""
    n, m = sim.shape
    buf = np.empty(k)
    for i in range(n):
        for t in range(k):
            buf[t] = -np.inf
        lo = 0
        for j in range(m):
            v = sim[i, j]
            if v > buf[lo]:
                buf[lo] = v
                for t in range(k):
                    if buf[t] < buf[lo]:
                        lo = t
        out[i] = buf.sum()


@njit(cache=True)
def col_topk_update(sim, top, lo):
    """Fold the rows of ``sim`` into running per-column top-k buffers.

    ``top`` has shape (n_cols, k), initialized to -inf; ``lo[j]`` is the slot
    of the smallest kept value of column ``j``.
    """
    n, m = sim.shape
    k = top.shape[1]
    for i in range(n):
        for j in range(m):
            v = sim[i, j]
            if v > top[j, lo[j]]:
                top[j, lo[j]] = v
                s = 0
                for t in range(1, k):
                    if top[j, t] < top[j, s]:
                        s = t
                lo[j] = s


@njit(cache=True)
def retrieve_block(sim, row0, pen_col, pen_row, use_csls, p, base_f, base_b, backward,
                   fwd_out, b_all_v, b_all_i, b_keep_v, b_keep_i):
    """One pass of forward and (optionally) backward retrieval over a block.

    ``sim`` holds similarities of queries ``row0 ...`` (forward direction) against
    all candidates. Forward results go to ``fwd_out``; backward state (best over
    all rows so far, and best among kept entries) accumulates per column.
    Strict comparisons while scanning in index order give lowest-index ties.
    """
    n, m = sim.shape
    stochastic = p < 1.0
    for ii in range(n):
        i = row0 + ii
        best = -np.inf
        best_j = 0
        kept = -np.inf
        kept_j = -1
        prow = pen_row[i] if use_csls else 0.0
        for j in range(m):
            s = sim[ii, j]
            v = 2.0 * s - pen_col[j] if use_csls else s
            if v > best:
                best = v
                best_j = j
            if stochastic and v > kept and _uniform(base_f, i, j) < p:
                kept = v
                kept_j = j
            if backward:
                w = 2.0 * s - prow if use_csls else s
                if w > b_all_v[j]:
                    b_all_v[j] = w
                    b_all_i[j] = i
                if stochastic and w > b_keep_v[j] and _uniform(base_b, j, i) < p:
                    b_keep_v[j] = w
                    b_keep_i[j] = i
        fwd_out[i] = kept_j if kept_j >= 0 else best_j
