"""Nearest-neighbor and CSLS retrieval over blocked similarity matrices.

All routines assume unit-normalized rows, so dot products are cosines. The
full ``len(a) x len(b)`` similarity matrix is never materialized: rows of
``a`` are processed ``block_size`` at a time, bounding peak memory to about
``block_size * len(b) * 8`` bytes.

Ties are broken towards the lowest index (``np.argmax`` semantics).
"""

import numpy as np

from ._kernels import col_topk_update, key_base, keyed_uniform, retrieve_block, row_topk_sum
from ._validation import check_matrix, check_positive_int, check_probability, check_same_dim

DEFAULT_BLOCK_SIZE = 1024


def iter_blocks(n, block_size=DEFAULT_BLOCK_SIZE):
    """Yield ``(block_index, start, stop)`` covering ``range(n)``."""
    block_size = check_positive_int(block_size, "block_size")
    for b, start in enumerate(range(0, n, block_size)):
        yield b, start, min(start + block_size, n)


def _check_pair(a, b):
    a = check_matrix(a, "a")
    b = check_matrix(b, "b")
    check_same_dim(a, b, ("a", "b"))
    return a, b


def topk_mean(sims, k):
    """Mean of the ``k`` largest entries of each row of ``sims``."""
    n = sims.shape[1]
    if k >= n:
        return sims.mean(axis=1)
    part = np.partition(sims, n - k, axis=1)[:, n - k:]
    return part.mean(axis=1)


def csls_penalty(b, other, k=10, block_size=DEFAULT_BLOCK_SIZE):
    """Mean similarity of each row of ``b`` to its ``k`` nearest rows of ``other``.

    ``k`` is clamped to ``len(other)``.
    """
    b, other = _check_pair(b, other)
    k = min(check_positive_int(k, "k"), other.shape[0])
    out = np.empty(b.shape[0])
    for _, start, stop in iter_blocks(b.shape[0], block_size):
        out[start:stop] = topk_mean(b[start:stop] @ other.T, k)
    return out


def stochastic_mask(sim, p, rng, copy=True):
    """Keep each entry of ``sim`` independently with probability ``p``.

    Dropped entries become ``-inf`` so they never win an argmax. A row that
    loses every entry gets its original maximum back, so each query keeps at
    least one candidate. ``p == 1`` returns the input unchanged.
    """
    p = check_probability(p)
    sim = np.asarray(sim, dtype=np.float64)
    if p == 1.0:
        return sim.copy() if copy else sim
    keep = rng.random(sim.shape, dtype=np.float32) < p
    dead = np.flatnonzero(~keep.any(axis=1))
    if dead.size:
        keep[dead, sim[dead].argmax(axis=1)] = True
    if copy:
        return np.where(keep, sim, -np.inf)
    sim[~keep] = -np.inf
    return sim


def keyed_mask(scores, p, key, row0=0):
    """In-place :func:`stochastic_mask` driven by the keyed uniform stream.

    Row ``r`` of ``scores`` is query ``row0 + r``; its keep decisions are
    fixed by ``(key, query, candidate)`` alone, whatever the block layout.
    """
    p = check_probability(p)
    if p == 1.0:
        return scores
    keep = keyed_uniform(key, np.arange(row0, row0 + scores.shape[0]), scores.shape[1]) < p
    dead = np.flatnonzero(~keep.any(axis=1))
    if dead.size:
        keep[dead, scores[dead].argmax(axis=1)] = True
    scores[~keep] = -np.inf
    return scores


def retrieve(a, b, *, use_csls=True, k=10, p=1.0, rng_key=None,
             penalty_b=None, block_size=DEFAULT_BLOCK_SIZE):
    """Best row of ``b`` for every row of ``a``.

    Scores are plain cosines, or ``2 cos(a_i, b_j) - penalty_b[j]`` when
    ``use_csls`` is set (the query-side penalty is constant per row and does not
    affect the argmax). With ``p < 1`` scores are masked by :func:`keyed_mask`
    under ``rng_key``.

    Returns
    -------
    indices : ndarray of int
    """
    a, b = _check_pair(a, b)
    if p < 1.0 and rng_key is None:
        raise ValueError("rng_key is required when p < 1")
    if use_csls and penalty_b is None:
        penalty_b = csls_penalty(b, a, k, block_size)
    out = np.empty(a.shape[0], dtype=np.intp)
    for _, start, stop in iter_blocks(a.shape[0], block_size):
        scores = a[start:stop] @ b.T
        if use_csls:
            scores *= 2.0
            scores -= penalty_b
        if p < 1.0:
            keyed_mask(scores, p, rng_key, row0=start)
        out[start:stop] = scores.argmax(axis=1)
    return out


def fused_retrieve(a, b, *, use_csls=True, k=10, p=1.0, rng_key=None, backward=True,
                   block_size=DEFAULT_BLOCK_SIZE):
    """Forward and backward retrieval sharing one scan of the similarity matrix.

    Equivalent to ``retrieve(a, b, rng_key=(*rng_key, 0))`` and, when
    ``backward`` is set, ``retrieve(b, a, rng_key=(*rng_key, 1))``, with the
    same masks and tie-breaking. Each block of ``a @ b.T`` is computed at most
    twice (once when it all fits in one block): a first pass collects the CSLS
    penalties, a second runs the compiled retrieval.

    Returns
    -------
    fwd : ndarray of int, shape (len(a),)
    bwd : ndarray of int, shape (len(b),), or None without ``backward``
    """
    a, b = _check_pair(a, b)
    p = check_probability(p)
    if p < 1.0 and rng_key is None:
        raise ValueError("rng_key is required when p < 1")
    n_a, n_b = a.shape[0], b.shape[0]
    blocks = list(iter_blocks(n_a, block_size))
    whole = a @ b.T if len(blocks) == 1 else None

    def sim(start, stop):
        return whole if whole is not None else a[start:stop] @ b.T

    pen_a = np.zeros(n_a)
    pen_b = np.zeros(n_b)
    if use_csls:
        k = check_positive_int(k, "k")
        k_b, k_a = min(k, n_a), min(k, n_b)
        top = np.full((n_b, k_b), -np.inf)
        lo = np.zeros(n_b, dtype=np.intp)
        for _, start, stop in blocks:
            s = sim(start, stop)
            col_topk_update(s, top, lo)
            if backward:
                row_topk_sum(s, k_a, pen_a[start:stop])
        pen_b = top.sum(axis=1) / k_b
        pen_a /= k_a

    key = (0,) if rng_key is None else tuple(rng_key)
    base_f = np.uint64(key_base((*key, 0)))
    base_b = np.uint64(key_base((*key, 1)))
    fwd = np.empty(n_a, dtype=np.intp)
    b_all_v = np.full(n_b, -np.inf)
    b_all_i = np.zeros(n_b, dtype=np.intp)
    b_keep_v = np.full(n_b, -np.inf)
    b_keep_i = np.full(n_b, -1, dtype=np.intp)
    for _, start, stop in blocks:
        retrieve_block(sim(start, stop), start, pen_b, pen_a, use_csls, p,
                       base_f, base_b, backward, fwd, b_all_v, b_all_i, b_keep_v, b_keep_i)
    if not backward:
        return fwd, None
    return fwd, np.where(b_keep_i >= 0, b_keep_i, b_all_i)


def nn_retrieve(a, b, block_size=DEFAULT_BLOCK_SIZE):
    """Index of the most similar row of ``b`` for every row of ``a``."""
    return retrieve(a, b, use_csls=False, block_size=block_size)


def csls_retrieve(a, b, k=10, block_size=DEFAULT_BLOCK_SIZE):
    """CSLS retrieval from ``a`` into ``b`` with neighborhood size ``k``."""
    return retrieve(a, b, use_csls=True, k=k, block_size=block_size)
