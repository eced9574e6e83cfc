"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_matrix(m, name="matrix", allow_empty=False):
    """Return ``m`` as a 2-D float64 array, rejecting NaN/inf."""
    m = check_array(
        m,
        dtype=np.float64,
        ensure_2d=True,
        ensure_min_samples=0 if allow_empty else 1,
        ensure_min_features=0 if allow_empty else 1,
        input_name=name,
    )
    return m


def check_same_dim(a, b, names=("a", "b")):
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"{names[0]} has {a.shape[1]} columns but {names[1]} has {b.shape[1]}"
        )


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_probability(p, name="p"):
    if not isinstance(p, numbers.Real) or not (0.0 < p <= 1.0):
        raise ValueError(f"{name} must lie in (0, 1], got {p!r}")
    return float(p)
