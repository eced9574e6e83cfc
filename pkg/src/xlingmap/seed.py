"""Initial (seed) dictionaries: fully unsupervised, or random for ablations."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_matrix, check_positive_int, check_same_dim
from .normalize import normalize_pipeline
from .retrieval import DEFAULT_BLOCK_SIZE, fused_retrieve


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Translation pairs ``(src[i], trg[i])`` between two vocabularies.

    Pairs may repeat: a bidirectional dictionary is the concatenation of the
    forward and backward retrievals, so a pair found both ways counts twice
    when fitting a mapping.
    """

    src: np.ndarray
    trg: np.ndarray
    shape: tuple

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.intp).ravel()
        trg = np.asarray(self.trg, dtype=np.intp).ravel()
        if src.shape != trg.shape:
            raise ValueError("src and trg must have the same length")
        n_src, n_trg = (int(s) for s in self.shape)
        if src.size and (src.min() < 0 or src.max() >= n_src):
            raise ValueError("source index out of bounds")
        if trg.size and (trg.min() < 0 or trg.max() >= n_trg):
            raise ValueError("target index out of bounds")
        src.flags.writeable = False
        trg.flags.writeable = False
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "trg", trg)
        object.__setattr__(self, "shape", (n_src, n_trg))

    def __len__(self):
        return self.src.size

    def pairs(self):
        """The distinct ``(source, target)`` pairs as a set."""
        return set(zip(self.src.tolist(), self.trg.tolist()))

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return Dictionary(
            np.concatenate([self.src, other.src]),
            np.concatenate([self.trg, other.trg]),
            self.shape,
        )

    def restrict(self, n_src, n_trg):
        """Drop pairs that fall outside the first ``n_src`` x ``n_trg`` words."""
        n_src, n_trg = min(n_src, self.shape[0]), min(n_trg, self.shape[1])
        keep = (self.src < n_src) & (self.trg < n_trg)
        return Dictionary(self.src[keep], self.trg[keep], (n_src, n_trg))

    def resize(self, n_src, n_trg):
        """Same pairs, declared over vocabularies of a different size."""
        return Dictionary(self.src, self.trg, (n_src, n_trg))

    def same_as(self, other):
        return (
            self.shape == other.shape
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.trg, other.trg)
        )


def similarity_sqrt(x):
    """Square root ``U S U^T`` of the similarity matrix ``x x^T``, from the thin SVD of ``x``."""
    x = check_matrix(x, "x")
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    return (u * s) @ u.T


def similarity_signature(x):
    """Rows of ``similarity_sqrt(x)`` sorted ascending, then normalized.

    Sorting discards which word each similarity refers to, leaving a
    description of the word's similarity distribution that is comparable
    across languages.
    """
    root = similarity_sqrt(x)
    root.sort(axis=1)
    return normalize_pipeline(root)


def unsupervised_seed(xs, xt, n_init=4000, k=10, block_size=DEFAULT_BLOCK_SIZE):
    """Induce a seed dictionary without any bilingual signal.

    Both (already normalized) matrices are cut to their first ``n_init`` rows,
    clamped to the smaller vocabulary. The similarity signatures of each side
    act as pseudo-embeddings for bidirectional CSLS retrieval.
    """
    xs = check_matrix(xs, "xs")
    xt = check_matrix(xt, "xt")
    check_same_dim(xs, xt, ("xs", "xt"))
    n = min(check_positive_int(n_init, "n_init"), xs.shape[0], xt.shape[0])
    sig_s = similarity_signature(xs[:n])
    sig_t = similarity_signature(xt[:n])
    fwd, bwd = fused_retrieve(sig_s, sig_t, k=k, block_size=block_size)
    idx = np.arange(n)
    shape = (xs.shape[0], xt.shape[0])
    return Dictionary(idx, fwd, shape) + Dictionary(bwd, idx, shape)


def random_seed_complete(vs_size, vt_size, seed=None):
    """Pair every word of the smaller vocabulary with a random word of the larger.

    Sampling is with replacement. On equal sizes the source side is enumerated.
    """
    vs_size = check_positive_int(vs_size, "vs_size")
    vt_size = check_positive_int(vt_size, "vt_size")
    rng = np.random.default_rng(seed)
    if vs_size <= vt_size:
        src = np.arange(vs_size)
        trg = rng.integers(0, vt_size, size=vs_size)
    else:
        trg = np.arange(vt_size)
        src = rng.integers(0, vs_size, size=vt_size)
    return Dictionary(src, trg, (vs_size, vt_size))


def random_seed_cutoff(vs_size, vt_size, n, seed=None):
    """Random pairing restricted to the ``n`` most frequent words of each side."""
    n = check_positive_int(n, "n")
    vs_size = check_positive_int(vs_size, "vs_size")
    vt_size = check_positive_int(vt_size, "vt_size")
    d = random_seed_complete(min(vs_size, n), min(vt_size, n), seed)
    return d.resize(vs_size, vt_size)
