"""Precision@1 against a gold translation dictionary."""

from dataclasses import dataclass

import numpy as np

from .mapping import MappingPair
from .normalize import unit_normalize
from .retrieval import DEFAULT_BLOCK_SIZE, csls_penalty, retrieve

SUCCESS_THRESHOLD = 0.05


@dataclass(frozen=True)
class GoldDictionary:
    """Map from a source token to the set of acceptable target tokens."""

    entries: dict

    def __post_init__(self):
        if not self.entries:
            raise ValueError("gold dictionary is empty")
        entries = {}
        for src, trgs in self.entries.items():
            if not src or not trgs or not all(trgs):
                raise ValueError(f"empty token in gold entry for {src!r}")
            entries[src] = frozenset(trgs)
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_pairs(cls, pairs):
        entries = {}
        for src, trg in pairs:
            entries.setdefault(src, set()).add(trg)
        return cls(entries)


def load_gold(path, encoding="utf-8"):
    """Read a ``source target`` per line file; blank lines are skipped."""
    pairs = []
    with open(path, encoding=encoding, errors="surrogateescape") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'source target', got {line.strip()!r}")
            pairs.append(tuple(parts))
    if not pairs:
        raise ValueError(f"{path}: no dictionary entries")
    return GoldDictionary.from_pairs(pairs)


def write_gold(pairs, path, encoding="utf-8"):
    with open(path, "w", encoding=encoding, newline="\n") as f:
        for src, trg in pairs:
            f.write(f"{src}\t{trg}\n")


def evaluable_entries(xs, xt, gold):
    """Gold sources present in ``xs`` with at least one translation in ``xt``."""
    return [
        (src, trgs) for src, trgs in gold.entries.items()
        if src in xs and any(t in xt for t in trgs)
    ]


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    coverage: float
    n_correct: int
    n_evaluated: int

    def __iter__(self):
        return iter((self.accuracy, self.coverage))


def evaluate_p1(xs, xt, mapping, gold, k=10, use_csls=True, block_size=DEFAULT_BLOCK_SIZE):
    """Top-1 translation accuracy over the full target vocabulary.

    Parameters
    ----------
    xs, xt : EmbeddingSet
        Normalized embeddings the mapping was fitted on.
    mapping : MappingPair or (ndarray, ndarray)
        Either the learned maps, or already-mapped source and target matrices
        aligned with ``xs.words`` and ``xt.words``.

    Returns
    -------
    EvalResult
        Unpacks as ``(accuracy, coverage)``. Coverage is the fraction of gold
        entries that could be evaluated.
    """
    if isinstance(mapping, MappingPair):
        src_m, trg_m = mapping.map_source(xs.matrix), mapping.map_target(xt.matrix)
    else:
        src_m, trg_m = (np.asarray(m, dtype=np.float64) for m in mapping)
    if src_m.shape[0] != len(xs) or trg_m.shape[0] != len(xt):
        raise ValueError("mapped matrices do not match the vocabularies")
    src_m = unit_normalize(src_m)
    trg_m = unit_normalize(trg_m)
    entries = evaluable_entries(xs, xt, gold)
    if not entries:
        raise ValueError("no gold entry can be evaluated with these vocabularies")
    rows = np.array([xs.index(src) for src, _ in entries])
    penalty = csls_penalty(trg_m, src_m, k, block_size) if use_csls else None
    hits = retrieve(src_m[rows], trg_m, use_csls=use_csls, k=k,
                    penalty_b=penalty, block_size=block_size)
    n_correct = sum(xt.words[j] in trgs for j, (_, trgs) in zip(hits, entries))
    n = len(entries)
    return EvalResult(n_correct / n, n / len(gold), n_correct, n)


def is_success(accuracy):
    """A run counts as successful when its accuracy is strictly above 5%."""
    return accuracy > SUCCESS_THRESHOLD
