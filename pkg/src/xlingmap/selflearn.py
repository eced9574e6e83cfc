"""Robust self-learning: alternate orthogonal mapping and dictionary induction."""

import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ._validation import check_matrix, check_positive_int, check_probability, check_same_dim
from .mapping import objective, orthogonal_map
from .retrieval import DEFAULT_BLOCK_SIZE, fused_retrieve
from .seed import Dictionary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelfLearnConfig:
    """Hyperparameters of the self-learning loop.

    Attributes
    ----------
    vocab_cutoff : int
        Only the most frequent ``vocab_cutoff`` words of each side take part in
        dictionary induction.
    csls_k : int
        CSLS neighborhood size (also used for the unsupervised seed).
    use_csls, bidirectional, stochastic : bool
        Toggle the three induction refinements.
    p0, p_factor : float
        Initial keep probability of the stochastic mask and its growth factor.
    epsilon, window : float, int
        ``p`` grows (or the loop stops once ``p == 1``) when the best objective
        has not improved by more than ``epsilon`` for ``window`` iterations.
    max_iterations : int
        Safety bound; reaching it is reported as ``max_iterations_hit``.
    rng_seed : int
        Non-negative seed for the stochastic masks.
    """

    vocab_cutoff: int = 20000
    csls_k: int = 10
    use_csls: bool = True
    bidirectional: bool = True
    stochastic: bool = True
    p0: float = 0.1
    p_factor: float = 2.0
    epsilon: float = 1e-6
    window: int = 50
    max_iterations: int = 10000
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("vocab_cutoff", "csls_k", "window", "max_iterations"):
            check_positive_int(getattr(self, name), name)
        check_probability(self.p0, "p0")
        if not self.p_factor > 1:
            raise ValueError(f"p_factor must be > 1, got {self.p_factor}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.rng_seed) < 0:
            raise ValueError("rng_seed must be non-negative")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, values):
        names = {f.name for f in fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    objective: float
    p: float
    dictionary_size: int


@dataclass
class LearnTrace:
    records: list = field(default_factory=list)
    status: str = "running"

    @property
    def n_iterations(self):
        return len(self.records)

    @property
    def objectives(self):
        return np.array([r.objective for r in self.records])

    @property
    def keep_probabilities(self):
        return np.array([r.p for r in self.records])


def induce_dictionary(xs_m, xt_m, cfg, p=1.0, rng_key=None, block_size=DEFAULT_BLOCK_SIZE):
    """Induce a dictionary from mapped, unit-normalized embeddings.

    The forward direction retrieves a target for every source row; the
    backward direction a source for every target row. With
    ``cfg.bidirectional`` both are concatenated. Retrieval uses CSLS when
    ``cfg.use_csls`` is set. With ``p < 1`` each score is kept with
    probability ``p`` under the keyed stream ``(*rng_key, direction)``
    (0 forward, 1 backward), exactly as :func:`~xlingmap.retrieval.retrieve`
    would mask it.

    """
    fwd, bwd = fused_retrieve(xs_m, xt_m, use_csls=cfg.use_csls, k=cfg.csls_k, p=p,
                              rng_key=rng_key, backward=cfg.bidirectional,
                              block_size=block_size)
    shape = (xs_m.shape[0], xt_m.shape[0])
    d = Dictionary(np.arange(shape[0]), fwd, shape)
    if cfg.bidirectional:
        d = d + Dictionary(bwd, np.arange(shape[1]), shape)
    return d


def self_learn(xs, xt, d0, cfg=None, block_size=DEFAULT_BLOCK_SIZE):
    """Refine the seed dictionary ``d0`` until convergence.

    ``xs`` and ``xt`` are the normalized embeddings of the full vocabularies;
    the mapping is fitted on them while induction only considers the first
    ``cfg.vocab_cutoff`` rows of each side.

    Returns
    -------
    mapping : MappingPair
        Orthogonal maps fitted on the returned dictionary.
    dictionary : Dictionary
    trace : LearnTrace
    """
    cfg = SelfLearnConfig() if cfg is None else cfg
    xs = check_matrix(xs, "xs")
    xt = check_matrix(xt, "xt")
    check_same_dim(xs, xt, ("xs", "xt"))
    if len(d0) == 0:
        raise ValueError("seed dictionary is empty")
    if d0.shape != (xs.shape[0], xt.shape[0]):
        raise ValueError(f"seed dictionary shape {d0.shape} does not match inputs")
    n_s = min(cfg.vocab_cutoff, xs.shape[0])
    n_t = min(cfg.vocab_cutoff, xt.shape[0])
    full_shape = (xs.shape[0], xt.shape[0])

    trace = LearnTrace()
    d = d0
    p = cfg.p0 if cfg.stochastic else 1.0
    best = -math.inf
    last_improvement = 0
    for it in range(1, cfg.max_iterations + 1):
        pair = orthogonal_map(xs, xt, d)
        xs_m = xs[:n_s] @ pair.w_s
        xt_m = xt[:n_t] @ pair.w_t
        new = induce_dictionary(xs_m, xt_m, cfg, p, (cfg.rng_seed, it), block_size)
        obj = objective(xs_m, xt_m, new)
        if not math.isfinite(obj):
            raise FloatingPointError(f"non-finite objective {obj} at iteration {it} (p={p})")
        new = new.resize(*full_shape)
        trace.records.append(IterationRecord(it, obj, p, len(new)))
        if obj - best > cfg.epsilon:
            best = obj
            last_improvement = it
        # at p == 1 an unchanged dictionary repeats the same iterate forever
        fixed_point = p >= 1.0 and new.same_as(d)
        d = new
        if fixed_point:
            trace.status = "converged"
            break
        if it - last_improvement >= cfg.window:
            if p >= 1.0:
                trace.status = "converged"
                break
            p = min(1.0, p * cfg.p_factor)
            last_improvement = it
            logger.debug("iteration %d: keep probability raised to %g", it, p)
    else:
        trace.status = "max_iterations_hit"
    logger.info("self-learning %s after %d iterations, objective %.6f",
                trace.status, trace.n_iterations, trace.records[-1].objective)
    return orthogonal_map(xs, xt, d), d, trace
