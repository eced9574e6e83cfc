"""Orthogonal mapping for a fixed dictionary, its objective, and symmetric re-weighting."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_matrix, check_same_dim

EIGEN_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class MappingPair:
    """Linear maps sending both languages into a shared space.

    Source rows map as ``xs @ w_s`` and target rows as ``xt @ w_t``. ``kind`` is
    ``"orthogonal"`` while self-learning and ``"reweighted"`` after the final
    re-weighting step.
    """

    w_s: np.ndarray
    w_t: np.ndarray
    kind: str = "orthogonal"

    def __post_init__(self):
        if self.kind not in ("orthogonal", "reweighted"):
            raise ValueError(f"unknown mapping kind {self.kind!r}")

    def map_source(self, xs):
        return np.asarray(xs, dtype=np.float64) @ self.w_s

    def map_target(self, xt):
        return np.asarray(xt, dtype=np.float64) @ self.w_t


def _check_inputs(xs, xt, d):
    xs = check_matrix(xs, "xs")
    xt = check_matrix(xt, "xt")
    check_same_dim(xs, xt, ("xs", "xt"))
    if len(d) == 0:
        raise ValueError("dictionary is empty")
    return xs, xt


def orthogonal_map(xs, xt, d):
    """Orthogonal ``(w_s, w_t)`` maximizing the summed dictionary similarities.

    With ``C = xs[src]^T xt[trg] = U S V^T`` the optimum is ``w_s = U``,
    ``w_t = V`` (orthogonal Procrustes).
    """
    xs, xt = _check_inputs(xs, xt, d)
    c = xs[d.src].T @ xt[d.trg]
    u, _, vt = np.linalg.svd(c)
    return MappingPair(u, vt.T, "orthogonal")


def objective(xs_mapped, xt_mapped, d):
    """Mean similarity of the dictionary pairs in the mapped spaces."""
    xs_mapped, xt_mapped = _check_inputs(xs_mapped, xt_mapped, d)
    return float(np.einsum("ij,ij->i", xs_mapped[d.src], xt_mapped[d.trg]).mean())


def _inverse_sqrt_and_sqrt(z):
    """``(Z^T Z)^(-1/2)`` and ``(Z^T Z)^(1/2)`` with eigenvalues floored at EIGEN_FLOOR."""
    vals, vecs = np.linalg.eigh(z.T @ z)
    vals = np.maximum(vals, EIGEN_FLOOR)
    root = np.sqrt(vals)
    return (vecs / root) @ vecs.T, (vecs * root) @ vecs.T


def reweight_transforms(xs, xt, d):
    """The composite maps of whitening, orthogonal mapping, re-weighting and de-whitening.

    Each side is whitened with statistics of its dictionary rows, the
    whitened cross-covariance ``U S V^T`` is decomposed, both sides are scaled
    by ``S^(1/2)``, and each side is finally de-whitened with the other
    language's de-whitening expressed in the shared coordinates::

        w_s = Ws U S^(1/2) V^T Wt^(-1) V
        w_t = Wt V S^(1/2) U^T Ws^(-1) U
    """
    xs, xt = _check_inputs(xs, xt, d)
    white_s, dewhite_s = _inverse_sqrt_and_sqrt(xs[d.src])
    white_t, dewhite_t = _inverse_sqrt_and_sqrt(xt[d.trg])
    c = (xs[d.src] @ white_s).T @ (xt[d.trg] @ white_t)
    u, s, vt = np.linalg.svd(c)
    v = vt.T
    scale = np.sqrt(s)
    w_s = white_s @ (u * scale) @ vt @ dewhite_t @ v
    w_t = white_t @ (v * scale) @ u.T @ dewhite_s @ u
    return MappingPair(w_s, w_t, "reweighted")


def symmetric_reweight(xs, xt, d):
    """Apply :func:`reweight_transforms` and return the mapped matrices."""
    pair = reweight_transforms(xs, xt, d)
    return pair.map_source(xs), pair.map_target(xt)
