"""Word-embedding sets: loading, writing, vocabulary cutoff and synthetic fixtures.

Embedding files are in the word2vec text format::

    <count> <dim>
    <token> <v_1> ... <v_dim>
    ...

Rows are assumed to be sorted by descending corpus frequency, which is what
makes a prefix cutoff equivalent to keeping the most frequent words.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ortho_group

from ._validation import check_positive_int

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """An ordered vocabulary with one embedding row per token.

    Parameters
    ----------
    words : sequence of str
        Unique tokens, in file (frequency) order.
    matrix : array-like of shape (n_words, dim)
        Embedding rows, stored as read-only float64.
    """

    words: tuple
    matrix: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {matrix.shape}")
        if len(words) != matrix.shape[0]:
            raise ValueError(
                f"{len(words)} words but {matrix.shape[0]} matrix rows"
            )
        index = {w: i for i, w in enumerate(words)}
        if len(index) != len(words):
            raise ValueError("words must be unique")
        matrix.flags.writeable = False
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", index)

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self._index

    def index(self, word):
        """Row index of ``word``; raises KeyError when absent."""
        return self._index[word]

    def get(self, word, default=None):
        """Embedding row of ``word``, or ``default`` when absent."""
        i = self._index.get(word)
        return default if i is None else self.matrix[i]

    def with_matrix(self, matrix):
        """Same vocabulary, new rows (e.g. after normalization or mapping)."""
        return EmbeddingSet(self.words, matrix)


def _parse_header(line, path):
    parts = line.split()
    if len(parts) != 2:
        raise ValueError(f"{path}: malformed header {line.strip()!r}, expected '<count> <dim>'")
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"{path}: malformed header {line.strip()!r}") from None
    if count < 0:
        raise ValueError(f"{path}: negative word count {count}")
    if dim <= 0:
        raise ValueError(f"{path}: embedding dimension must be positive, got {dim}")
    return count, dim


def load_embeddings(path, max_vocab=None, encoding="utf-8"):
    """Read a word2vec text file into an :class:`EmbeddingSet`.

    Only the first ``max_vocab`` distinct tokens are kept. Later duplicates of a
    token are dropped with a warning, since the first occurrence is the most
    frequent one.
    """
    if max_vocab is not None:
        max_vocab = check_positive_int(max_vocab, "max_vocab")
    words = []
    rows = []
    seen = set()
    duplicates = 0
    with open(path, encoding=encoding, errors="surrogateescape") as f:
        header = f.readline()
        if not header.strip():
            raise ValueError(f"{path}: missing header")
        count, dim = _parse_header(header, path)
        limit = count if max_vocab is None else min(count, max_vocab)
        for lineno, line in enumerate(f, start=2):
            if len(words) >= limit:
                break
            parts = line.split()
            if not parts:
                continue
            if len(parts) != dim + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected token and {dim} values, got {len(parts) - 1} values"
                )
            token = parts[0]
            if token in seen:
                duplicates += 1
                continue
            try:
                rows.append(np.array(parts[1:], dtype=np.float64))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric embedding value") from None
            seen.add(token)
            words.append(token)
    if duplicates:
        msg = f"{path}: dropped {duplicates} duplicate token(s), kept first occurrences"
        warnings.warn(msg, stacklevel=2)
        logger.warning(msg)
    if not words:
        raise ValueError(f"{path}: empty vocabulary")
    if max_vocab is None and len(words) + duplicates < count:
        logger.warning("%s: header announces %d rows but only %d were read", path, count, len(words) + duplicates)
    return EmbeddingSet(words, np.vstack(rows))


def write_embeddings(emb, path, encoding="utf-8"):
    """Write ``emb`` in word2vec text format with round-trip float precision."""
    with open(path, "w", encoding=encoding, errors="surrogateescape", newline="\n") as f:
        f.write(f"{len(emb)} {emb.dim}\n")
        for word, row in zip(emb.words, emb.matrix):
            f.write(word + " " + " ".join(repr(float(v)) for v in row) + "\n")


def cutoff(emb, n):
    """Keep the ``n`` most frequent words (a prefix of the file order)."""
    n = check_positive_int(n, "n")
    if n >= len(emb):
        return emb
    return EmbeddingSet(emb.words[:n], emb.matrix[:n])


def generate_isometric_pair(vocab_size, d, seed=0, noise_sigma=0.0):
    """Build two embedding sets related by a permutation and a rotation.

    Source rows are standard normal. Target row ``gold[i]`` is source row ``i``
    times a random orthogonal matrix, plus isotropic Gaussian noise with
    per-coordinate standard deviation ``noise_sigma``. Source tokens are named
    ``s<i>`` and the matching target tokens ``t<i>``, so the gold dictionary can
    be recovered from the names alone.

    Returns
    -------
    source, target : EmbeddingSet
    gold : ndarray of shape (vocab_size,)
        ``gold[i]`` is the target row translating source row ``i``.
    """
    vocab_size = check_positive_int(vocab_size, "vocab_size")
    if vocab_size < 2:
        raise ValueError("vocab_size must be at least 2")
    d = check_positive_int(d, "d")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((vocab_size, d))
    q = ortho_group.rvs(d, random_state=rng) if d > 1 else np.array([[rng.choice([-1.0, 1.0])]])
    gold = rng.permutation(vocab_size)
    xt = np.empty_like(xs)
    xt[gold] = xs @ q
    if noise_sigma > 0:
        xt += noise_sigma * rng.standard_normal(xt.shape)
    src_words = [f"s{i}" for i in range(vocab_size)]
    trg_words = [None] * vocab_size
    for i, j in enumerate(gold):
        trg_words[j] = f"t{i}"
    return EmbeddingSet(src_words, xs), EmbeddingSet(trg_words, xt), gold
