import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from xlingmap.embeddings import generate_isometric_pair
from xlingmap.estimator import CrossLingualMapper
from xlingmap.normalize import normalize_pipeline


@pytest.fixture(scope="module")
def pair():
    src, trg, gold = generate_isometric_pair(300, 12, seed=5, noise_sigma=0.02)
    return src.matrix, trg.matrix, gold


@pytest.fixture(scope="module")
def fitted(pair):
    x, y, _ = pair
    return CrossLingualMapper(window=10).fit(x, y)


def test_defaults():
    params = CrossLingualMapper().get_params()
    assert params["init"] == "unsupervised" and params["init_cutoff"] == 4000
    assert params["vocab_cutoff"] == 20000 and params["csls_k"] == 10
    assert params["p0"] == 0.1 and params["p_factor"] == 2.0 and params["window"] == 50
    assert params["reweight"] and params["normalize"]
    assert clone(CrossLingualMapper(csls_k=3)).csls_k == 3


def test_fit_predict(pair, fitted):
    x, y, gold = pair
    assert fitted.converged_ and fitted.n_iter_ == fitted.trace_.n_iterations
    assert fitted.mapping_.kind == "reweighted"
    assert np.mean(fitted.predict(x) == gold) > 0.99
    assert fitted.transform(x[:5]).shape == (5, 12)
    assert fitted.transform_target(y[:5]).shape == (5, 12)


def test_fit_without_reweight_is_orthogonal(pair):
    x, y, gold = pair
    est = CrossLingualMapper(window=10, reweight=False, use_csls=False).fit(x, y)
    w = est.mapping_.w_s
    np.testing.assert_allclose(w.T @ w, np.eye(12), atol=1e-8)
    assert np.mean(est.predict(x) == gold) > 0.99


def test_prenormalized_inputs(pair):
    x, y, gold = pair
    xs, xt = normalize_pipeline(x), normalize_pipeline(y)
    est = CrossLingualMapper(window=10, normalize=False, stochastic=False).fit(xs, xt)
    assert not hasattr(est, "source_normalizer_")
    assert np.mean(est.predict(xs) == gold) > 0.99


def test_random_state_reproducible(pair):
    x, y, _ = pair
    a = CrossLingualMapper(window=5, random_state=4).fit(x, y)
    b = CrossLingualMapper(window=5, random_state=4).fit(x, y)
    assert a.dictionary_.same_as(b.dictionary_)


def test_random_inits_run(pair):
    x, y, _ = pair
    for init in ("random_complete", "random_cutoff"):
        est = CrossLingualMapper(init=init, window=3, vocab_cutoff=100).fit(x, y)
        assert len(est.seed_dictionary_) in (300, 100)


def test_errors(pair, fitted):
    x, y, _ = pair
    with pytest.raises(NotFittedError):
        CrossLingualMapper().predict(x)
    with pytest.raises(ValueError):
        CrossLingualMapper(init="magic").fit(x, y)
    with pytest.raises(ValueError):
        CrossLingualMapper().fit(x, y[:, :5])
    with pytest.raises(ValueError):
        fitted.transform(x[:, :5])
    bad = x.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        CrossLingualMapper().fit(bad, y)
