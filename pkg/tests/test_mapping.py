import numpy as np
import pytest
from conftest import random_unit
from scipy.linalg import sqrtm
from scipy.stats import ortho_group

from xlingmap.mapping import (
    MappingPair,
    objective,
    orthogonal_map,
    reweight_transforms,
    symmetric_reweight,
)
from xlingmap.seed import Dictionary


def _identity(n):
    return Dictionary(np.arange(n), np.arange(n), (n, n))


def _eq1(xs, xt, d, w_s, w_t):
    return sum(float((xs[i] @ w_s) @ (xt[j] @ w_t)) for i, j in zip(d.src, d.trg)) / len(d)


def test_self_alignment(rng):
    x = random_unit(rng, 12, 4)
    pair = orthogonal_map(x, x, _identity(12))
    np.testing.assert_allclose(pair.w_s @ pair.w_t.T, np.eye(4), atol=1e-8)


def test_rotation_recovered(rng):
    xs = random_unit(rng, 15, 4)
    xt = xs @ ortho_group.rvs(4, random_state=2)
    pair = orthogonal_map(xs, xt, _identity(15))
    np.testing.assert_allclose(pair.map_source(xs), pair.map_target(xt), atol=1e-8)


def test_procrustes_beats_random_rotations(rng):
    xs, xt = random_unit(rng, 10, 3), random_unit(rng, 10, 3)
    d = Dictionary(rng.integers(0, 10, 10), rng.integers(0, 10, 10), (10, 10))
    pair = orthogonal_map(xs, xt, d)
    best = _eq1(xs, xt, d, pair.w_s, pair.w_t)
    assert best == pytest.approx(objective(pair.map_source(xs), pair.map_target(xt), d))
    rot = ortho_group.rvs(3, size=400, random_state=3)
    rot2 = ortho_group.rvs(3, size=400, random_state=4)
    assert all(_eq1(xs, xt, d, a, b) <= best + 1e-12 for a, b in zip(rot, rot2))


def test_objective_examples(rng):
    x = random_unit(rng, 5, 3)
    assert objective(x, x, _identity(5)) == pytest.approx(1.0)
    e = np.eye(2)
    assert objective(e, e[::-1], _identity(2)) == 0.0
    xs = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
    xt = np.array([[0.6, 0.8], [1.0, 0.0], [0.0, 1.0]])
    d = Dictionary([0, 1, 2], [0, 0, 2], (3, 3))
    assert objective(xs, xt, d) == pytest.approx((0.6 + 0.8 + 0.8) / 3)
    q = ortho_group.rvs(3, random_state=5)
    y = random_unit(rng, 5, 3)
    assert objective(x @ q, y @ q, _identity(5)) == pytest.approx(objective(x, y, _identity(5)))
    with pytest.raises(ValueError):
        objective(x, x, Dictionary([], [], (5, 5)))


def test_reweight_self_case(rng):
    x = random_unit(rng, 20, 4)
    a, b = symmetric_reweight(x, x, _identity(20))
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_reweight_exact_isometry(rng):
    xs = random_unit(rng, 30, 5)
    xt = xs @ ortho_group.rvs(5, random_state=6)
    a, b = symmetric_reweight(xs, xt, _identity(30))
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_reweight_matches_explicit_composition(rng):
    xs, xt = random_unit(rng, 25, 4), random_unit(rng, 25, 4)
    d = Dictionary(rng.integers(0, 25, 30), rng.integers(0, 25, 30), (25, 25))
    zs, zt = xs[d.src], xt[d.trg]
    cs, ct = np.real(sqrtm(zs.T @ zs)), np.real(sqrtm(zt.T @ zt))
    ws, wt = np.linalg.inv(cs), np.linalg.inv(ct)
    u, s, vt = np.linalg.svd((zs @ ws).T @ (zt @ wt))
    v = vt.T
    half = np.diag(np.sqrt(s))
    expected_s = xs @ ws @ u @ half @ v.T @ ct @ v
    expected_t = xt @ wt @ v @ half @ u.T @ cs @ u
    pair = reweight_transforms(xs, xt, d)
    assert pair.kind == "reweighted"
    np.testing.assert_allclose(pair.map_source(xs), expected_s, atol=1e-8)
    np.testing.assert_allclose(pair.map_target(xt), expected_t, atol=1e-8)


def test_mapping_pair_kind():
    with pytest.raises(ValueError):
        MappingPair(np.eye(2), np.eye(2), "other")
