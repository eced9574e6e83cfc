import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from sklearn.base import clone

from xlingmap.normalize import EmbeddingNormalizer, mean_center, normalize_pipeline, unit_normalize

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_unit_normalize_examples():
    np.testing.assert_allclose(unit_normalize([[3.0, 4.0]]), [[0.6, 0.8]])
    np.testing.assert_array_equal(unit_normalize([[0.0, 0.0]]), [[0.0, 0.0]])


def test_mean_center_examples():
    np.testing.assert_array_equal(mean_center([[1.0, 2.0], [3.0, 4.0]]), [[-1, -1], [1, 1]])
    np.testing.assert_array_equal(mean_center([[5.0, 7.0]]), [[0.0, 0.0]])
    with pytest.raises(ValueError):
        mean_center(np.empty((0, 3)))


def test_pipeline_hand_example():
    h = np.sqrt(2) / 2
    np.testing.assert_allclose(normalize_pipeline([[1.0, 0.0], [0.0, 1.0]]), [[h, -h], [-h, h]])


def test_pipeline_order_is_pinned(rng):
    m = rng.standard_normal((6, 3)) + 2.0
    expected = unit_normalize(mean_center(unit_normalize(m)))
    np.testing.assert_array_equal(normalize_pipeline(m), expected)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 6)), elements=finite))
def test_pipeline_rows_unit_or_zero(m):
    out = normalize_pipeline(m)
    norms = np.linalg.norm(out, axis=1)
    assert np.all((np.abs(norms - 1) < 1e-12) | (norms == 0))


def test_normalizer_estimator(rng):
    x = rng.standard_normal((20, 4)) + 1.0
    est = EmbeddingNormalizer().fit(x)
    np.testing.assert_allclose(est.transform(x), normalize_pipeline(x))
    np.testing.assert_allclose(est.mean_, unit_normalize(x).mean(axis=0))
    # new rows reuse the fitted mean
    y = rng.standard_normal((3, 4))
    np.testing.assert_allclose(est.transform(y), unit_normalize(unit_normalize(y) - est.mean_))
    assert clone(est).get_params() == {}
    with pytest.raises(ValueError):
        est.transform(rng.standard_normal((2, 5)))
