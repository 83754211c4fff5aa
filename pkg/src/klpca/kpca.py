"""Kernel PCA through the dual (Gram) eigenproblem.

The centered Gramian ``J K J`` is factored as ``U D^2 U^T``; a point ``x``
is mapped to the coefficients ``D^{-1} U^T k~(x)`` of its projection onto the
principal directions in feature space, where ``k(x) = (K(x_i, x))_i``.

Test columns are centered against the training features,
``k~(x) = J (k(x) - (1/n) K 1)``, which makes the projection of a training
point equal to its row of ``U D``. ``raw=True`` skips that step and applies
``D^{-1} U^T`` to the uncentered column.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .kernels import GramMatrix, KernelSpec, center_gram, cross_gram, gram
from .linalg import RANK_TOL, as_matrix, gram_svd


@dataclass(frozen=True)
class KpcaModel:
    train_points: np.ndarray
    kernel: KernelSpec
    U: np.ndarray
    D: np.ndarray
    gram_uncentered: GramMatrix
    k_retained: int
    truncated: bool = False

    @property
    def n(self) -> int:
        return self.train_points.shape[1]

    @property
    def rank(self) -> int:
        return len(self.D)

    @property
    def spectrum(self) -> np.ndarray:
        """Eigenvalues ``D_j^2`` of the centered Gramian."""
        return self.D ** 2


def fit(points, kernel: KernelSpec, k: int, solver: str = "auto") -> KpcaModel:
    """Fit on the columns of ``points``, retaining ``min(k, r)`` components.

    ``r`` counts the positive modes of the centered Gramian above the rank
    tolerance; asking for more than ``r`` truncates and sets ``truncated``.
    """
    X = as_matrix(points, "points")
    n = X.shape[1]
    if n < 2:
        raise InvalidInput("kernel PCA needs at least two points")
    if k < 1:
        raise InvalidInput("k must be >= 1")
    G = gram(kernel, X)
    svd = gram_svd(center_gram(G).matrix, rank_tol=RANK_TOL, solver=solver)
    U, D = svd.U[:, : n - 1], svd.D[: n - 1]
    if len(D) == 0:
        raise InvalidInput("centered Gramian is zero: all points coincide in feature space")
    kept = min(k, len(D))
    return KpcaModel(X, kernel, U, D, G, kept, truncated=kept < k)


def _kernel_columns(model: KpcaModel, X: np.ndarray, raw: bool) -> np.ndarray:
    if X.shape[0] != model.train_points.shape[0]:
        raise InvalidInput(
            f"expected {model.train_points.shape[0]}-dimensional points, got {X.shape[0]}"
        )
    Kx = cross_gram(model.kernel, model.train_points, X)
    if raw:
        return Kx
    Kx = Kx - model.gram_uncentered.matrix.mean(axis=1, keepdims=True)
    return Kx - Kx.mean(axis=0, keepdims=True)


def project(model: KpcaModel, x, raw: bool = False) -> np.ndarray:
    """Projection coefficients of one point (1-D ``x``) or of the columns of a
    ``d x m`` array (returns ``m x k_retained``)."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    X = arr.reshape(-1, 1) if single else as_matrix(arr, "x")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("x contains NaN or Inf")
    k = model.k_retained
    coeffs = (model.U[:, :k].T @ _kernel_columns(model, X, raw)) / model.D[:k, None]
    return coeffs[:, 0] if single else coeffs.T


def embed_dataset(model: KpcaModel) -> np.ndarray:
    """``n x k_retained`` scores of the training points."""
    return project(model, model.train_points)


def variance_objective(model: KpcaModel, k: int) -> float:
    """``sum_{j<=k} D_j^2``: captured variance ``tr(Q_k G)`` of the top-k projection."""
    if not 0 <= k <= model.rank:
        raise InvalidInput(f"k must be in [0, {model.rank}]")
    return float(np.sum(model.D[:k] ** 2))
