"""Unsupervised cross-lingual word embedding mapping with robust self-learning."""

from .embeddings import EmbeddingSet, cutoff, generate_isometric_pair, load_embeddings, write_embeddings
from .estimator import CrossLingualMapper
from .evaluation import GoldDictionary, evaluate_p1, is_success, load_gold
from .mapping import MappingPair, objective, orthogonal_map, symmetric_reweight
from .normalize import EmbeddingNormalizer, mean_center, normalize_pipeline, unit_normalize
from .retrieval import csls_penalty, csls_retrieve, fused_retrieve, nn_retrieve, retrieve, stochastic_mask
from .seed import (
    Dictionary,
    random_seed_complete,
    random_seed_cutoff,
    similarity_signature,
    similarity_sqrt,
    unsupervised_seed,
)
from .selflearn import LearnTrace, SelfLearnConfig, induce_dictionary, self_learn

__version__ = "0.1.0"

__all__ = [
    "CrossLingualMapper",
    "Dictionary",
    "EmbeddingNormalizer",
    "EmbeddingSet",
    "GoldDictionary",
    "LearnTrace",
    "MappingPair",
    "SelfLearnConfig",
    "csls_penalty",
    "csls_retrieve",
    "cutoff",
    "evaluate_p1",
    "fused_retrieve",
    "generate_isometric_pair",
    "induce_dictionary",
    "is_success",
    "load_embeddings",
    "load_gold",
    "mean_center",
    "nn_retrieve",
    "normalize_pipeline",
    "objective",
    "orthogonal_map",
    "random_seed_complete",
    "random_seed_cutoff",
    "retrieve",
    "self_learn",
    "similarity_signature",
    "similarity_sqrt",
    "stochastic_mask",
    "symmetric_reweight",
    "unit_normalize",
    "unsupervised_seed",
    "write_embeddings",
]
