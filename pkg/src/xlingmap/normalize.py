"""Embedding normalization: unit length, mean centering, unit length again."""

import numpy as np
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import check_matrix


def unit_normalize(m):
    """Divide every nonzero row by its Euclidean norm; zero rows pass through."""
    m = check_matrix(m, allow_empty=True)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return m / norms


def mean_center(m):
    """Subtract the column means."""
    m = check_matrix(m)
    return m - m.mean(axis=0, keepdims=True)


def normalize_pipeline(m):
    return unit_normalize(mean_center(unit_normalize(m)))


class EmbeddingNormalizer(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Stateful version of :func:`normalize_pipeline`.

    ``fit`` records the column means of the length-normalized training rows, so
    that ``transform`` can apply the identical centering to new rows. On the
    training matrix, ``fit_transform`` equals ``normalize_pipeline``.

    Attributes
    ----------
    mean_ : ndarray of shape (n_features,)
        Column means of the unit-normalized training rows.
    """

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        self.mean_ = unit_normalize(X).mean(axis=0)
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return unit_normalize(unit_normalize(X) - self.mean_)
