"""scikit-learn style estimator wrapping the full mapping pipeline."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_matrix, check_same_dim
from .mapping import reweight_transforms
from .normalize import EmbeddingNormalizer, unit_normalize
from .retrieval import DEFAULT_BLOCK_SIZE, csls_penalty, retrieve
from .seed import random_seed_complete, random_seed_cutoff, unsupervised_seed
from .selflearn import SelfLearnConfig, self_learn

INIT_MODES = ("unsupervised", "random_complete", "random_cutoff")


class CrossLingualMapper(TransformerMixin, BaseEstimator):
    """Unsupervised mapping of two embedding spaces into a shared space.

    ``fit(X, Y)`` takes the source embeddings ``X`` and the target embeddings
    ``Y`` (rows in descending frequency order, the two vocabularies may differ
    in size) and learns one linear map per side:

    1. both matrices are normalized (unit length, centered, unit length);
    2. a seed dictionary is induced from similarity signatures, or drawn at
       random for the ablation modes;
    3. self-learning alternates orthogonal mapping and stochastic CSLS
       dictionary induction until convergence;
    4. a final symmetric re-weighting is applied once.

    Parameters
    ----------
    init : {"unsupervised", "random_complete", "random_cutoff"}, default="unsupervised"
        Seed dictionary construction. ``random_cutoff`` pairs words at random
        within the first ``vocab_cutoff`` words of each side.
    init_cutoff : int, default=4000
        Vocabulary size used to build the unsupervised seed.
    reweight : bool, default=True
        Apply the symmetric re-weighting after self-learning.
    normalize : bool, default=True
        Normalize inputs. Disable only for already-normalized matrices.
    block_size : int, default=1024
        Rows per similarity block.
    random_state : int or None, default=0
        Seed for the stochastic masks and the random seed dictionaries.
    vocab_cutoff, csls_k, use_csls, bidirectional, stochastic, p0, p_factor, epsilon, window, max_iterations
        See :class:`~xlingmap.selflearn.SelfLearnConfig`.

    Attributes
    ----------
    mapping_ : MappingPair
        Learned maps for normalized source and target rows.
    dictionary_ : Dictionary
        Final induced dictionary (row indices of ``X`` and ``Y``).
    seed_dictionary_ : Dictionary
    trace_ : LearnTrace
    n_iter_ : int
    converged_ : bool
    n_features_in_ : int
    """

    def __init__(self, init="unsupervised", init_cutoff=4000, vocab_cutoff=20000,
                 csls_k=10, use_csls=True, bidirectional=True, stochastic=True,
                 p0=0.1, p_factor=2.0, epsilon=1e-6, window=50, max_iterations=10000,
                 reweight=True, normalize=True, block_size=DEFAULT_BLOCK_SIZE,
                 random_state=0):
        self.init = init
        self.init_cutoff = init_cutoff
        self.vocab_cutoff = vocab_cutoff
        self.csls_k = csls_k
        self.use_csls = use_csls
        self.bidirectional = bidirectional
        self.stochastic = stochastic
        self.p0 = p0
        self.p_factor = p_factor
        self.epsilon = epsilon
        self.window = window
        self.max_iterations = max_iterations
        self.reweight = reweight
        self.normalize = normalize
        self.block_size = block_size
        self.random_state = random_state

    def _seed(self):
        if self.random_state is None:
            return int(np.random.default_rng().integers(2**31))
        return int(self.random_state)

    def selflearn_config(self, seed=None):
        return SelfLearnConfig(
            vocab_cutoff=self.vocab_cutoff, csls_k=self.csls_k, use_csls=self.use_csls,
            bidirectional=self.bidirectional, stochastic=self.stochastic, p0=self.p0,
            p_factor=self.p_factor, epsilon=self.epsilon, window=self.window,
            max_iterations=self.max_iterations,
            rng_seed=self._seed() if seed is None else seed,
        )

    def _seed_dictionary(self, xs, xt, seed):
        n_s, n_t = xs.shape[0], xt.shape[0]
        if self.init == "unsupervised":
            return unsupervised_seed(xs, xt, self.init_cutoff, self.csls_k, self.block_size)
        if self.init == "random_complete":
            return random_seed_complete(n_s, n_t, seed)
        if self.init == "random_cutoff":
            return random_seed_cutoff(n_s, n_t, self.vocab_cutoff, seed)
        raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")

    def fit(self, X, Y):
        """Learn the maps from source embeddings ``X`` and target embeddings ``Y``.

        Returns
        -------
        self : CrossLingualMapper
        """
        X = check_matrix(X, "X")
        Y = check_matrix(Y, "Y")
        check_same_dim(X, Y, ("X", "Y"))
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        seed = self._seed()
        cfg = self.selflearn_config(seed)
        if self.normalize:
            self.source_normalizer_ = EmbeddingNormalizer().fit(X)
            self.target_normalizer_ = EmbeddingNormalizer().fit(Y)
            xs = self.source_normalizer_.transform(X)
            xt = self.target_normalizer_.transform(Y)
        else:
            xs, xt = X, Y
        self.seed_dictionary_ = self._seed_dictionary(xs, xt, seed)
        mapping, dictionary, trace = self_learn(xs, xt, self.seed_dictionary_, cfg, self.block_size)
        if self.reweight:
            mapping = reweight_transforms(xs, xt, dictionary)
        self.mapping_ = mapping
        self.dictionary_ = dictionary
        self.trace_ = trace
        self.n_iter_ = trace.n_iterations
        self.converged_ = trace.status == "converged"
        self.n_features_in_ = X.shape[1]
        self.source_mapped_ = unit_normalize(mapping.map_source(xs))
        self.target_mapped_ = unit_normalize(mapping.map_target(xt))
        self._target_penalty = None
        return self

    def _prepare(self, X, side):
        check_is_fitted(self, "mapping_")
        X = check_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} is expecting "
                f"{self.n_features_in_} features as input"
            )
        if self.normalize:
            X = getattr(self, f"{side}_normalizer_").transform(X)
        return X

    def transform(self, X):
        """Map source-language rows into the shared space."""
        X = self._prepare(X, "source")
        return self.mapping_.map_source(X)

    def transform_target(self, Y):
        """Map target-language rows into the shared space."""
        Y = self._prepare(Y, "target")
        return self.mapping_.map_target(Y)

    def predict(self, X):
        """Index of the best translation among the fitted target rows.

        Uses CSLS retrieval when ``use_csls`` is set, nearest neighbor otherwise.
        """
        queries = unit_normalize(self.transform(X))
        if self.use_csls and self._target_penalty is None:
            self._target_penalty = csls_penalty(
                self.target_mapped_, self.source_mapped_, self.csls_k, self.block_size)
        return retrieve(queries, self.target_mapped_, use_csls=self.use_csls, k=self.csls_k,
                        penalty_b=self._target_penalty, block_size=self.block_size)
