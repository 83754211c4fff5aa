"""Linear PCA / Karhunen-Loeve transform, frame operators and residual errors.

Data matrices hold one sample per column (``d x n``). The feature matrix ``A``
stores the principal directions as ROWS, so ``Y = A (X - m)`` and
``X = A^T Y + m``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, NotPositiveDefinite
from .linalg import as_matrix, as_symmetric, symmetric_eigh

NEGATIVE_EIG_TOL = 1e-10


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    feature_matrix: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def covariance(X) -> np.ndarray:
    """Population covariance ``(1/n) (X - m)(X - m)^T``."""
    X = as_matrix(X, "X")
    B = X - X.mean(axis=1, keepdims=True)
    C = B @ B.T / X.shape[1]
    return 0.5 * (C + C.T)


def fit(X, solver: str = "auto") -> PcaModel:
    X = as_matrix(X, "X")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise InvalidInput("empty data matrix")
    mean = X.mean(axis=1)
    spec = symmetric_eigh(covariance(X), solver=solver)
    lam = spec.eigenvalues.copy()
    floor = -NEGATIVE_EIG_TOL * max(1.0, lam[0])
    if lam[-1] < floor:
        raise NotPositiveDefinite(f"covariance has eigenvalue {lam[-1]:.3g}")
    lam[lam < 0] = 0.0
    return PcaModel(mean, spec.eigenvectors.T.copy(), lam)


def _check_dim(model: PcaModel, X: np.ndarray):
    if X.shape[0] != model.dim:
        raise InvalidInput(f"expected {model.dim} features, got {X.shape[0]}")


def transform(model: PcaModel, X) -> np.ndarray:
    X = as_matrix(X, "X")
    _check_dim(model, X)
    return model.feature_matrix @ (X - model.mean[:, None])


def reconstruct(model: PcaModel, Y, l: int | None = None) -> np.ndarray:
    """``X' = A_l^T Y_l + m`` using the top ``l`` components."""
    Y = as_matrix(Y, "Y")
    _check_dim(model, Y)
    if l is None:
        l = model.dim
    if not 1 <= l <= model.dim:
        raise InvalidInput(f"l must be in [1, {model.dim}]")
    return model.feature_matrix[:l].T @ Y[:l] + model.mean[:, None]


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class FrameOperator:
    """``G = sum_a w_a |f_a><f_a|`` for unit vectors ``f_a`` (columns)."""

    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        F = as_matrix(self.vectors, "vectors")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (F.shape[1],):
            raise InvalidInput("need one weight per frame vector")
        if np.any(w < 0):
            raise InvalidInput("weights must be nonnegative")
        if np.any(np.abs(np.linalg.norm(F, axis=0) - 1.0) > 1e-10):
            raise InvalidInput("frame vectors must be unit vectors")
        object.__setattr__(self, "vectors", F)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_vectors(cls, vectors, weights=None) -> "FrameOperator":
        """Normalise arbitrary nonzero vectors; weights default to 1."""
        F = as_matrix(vectors, "vectors")
        norms = np.linalg.norm(F, axis=0)
        if np.any(norms == 0):
            raise InvalidInput("zero frame vector")
        if weights is None:
            weights = np.ones(F.shape[1])
        return cls(F / norms, weights)

    @property
    def matrix(self) -> np.ndarray:
        F = self.vectors
        G = (F * self.weights) @ F.T
        return 0.5 * (G + G.T)


def _check_onb(onb, dim: int) -> np.ndarray:
    Psi = as_matrix(onb, "onb")
    if Psi.shape[0] != dim:
        raise InvalidInput("basis dimension does not match operator")
    gram = Psi.T @ Psi
    if np.max(np.abs(gram - np.eye(Psi.shape[1])), initial=0.0) > 1e-9:
        raise InvalidInput("basis columns are not orthonormal")
    return Psi


def residual_error(G, onb, n: int) -> float:
    """``tr(G (I - Q_n))`` where ``Q_n`` projects onto the first ``n`` basis columns."""
    G = as_symmetric(G, "G")
    Psi = _check_onb(onb, G.shape[0])
    if not 0 <= n <= Psi.shape[1]:
        raise InvalidInput(f"n must be in [0, {Psi.shape[1]}]")
    P = Psi[:, :n]
    return float(np.trace(G) - np.trace(P.T @ G @ P))


def frame_residual(frame: FrameOperator, onb, n: int) -> float:
    """``sum_a w_a ||f_a - sum_{i<=n} <psi_i, f_a> psi_i||^2`` evaluated term by term."""
    F = frame.vectors
    Psi = _check_onb(onb, F.shape[0])
    P = Psi[:, :n]
    R = F - P @ (P.T @ F)
    return float(np.sum(frame.weights * np.sum(R * R, axis=0)))


class FrameBounds(NamedTuple):
    lower: float
    upper: float
    spanning: bool


def frame_bounds(vectors, rank_tol: float = 1e-10) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of ``S = sum |h><h|``.

    If the vectors do not span their ambient space the lower bound is 0 and
    ``spanning`` is False.
    """
    H = as_matrix(vectors, "vectors")
    if H.size == 0:
        raise InvalidInput("no frame vectors")
    lam = symmetric_eigh(H @ H.T).eigenvalues
    spanning = bool(lam[-1] > rank_tol * lam[0]) if lam[0] > 0 else False
    return FrameBounds(float(lam[-1]) if spanning else 0.0, float(lam[0]), spanning)


# ---------------------------------------------------------------------------
# color images


class ColorPca(NamedTuple):
    model: PcaModel
    planes: np.ndarray   # 3 x h x w, each rescaled to [0, 1]
    scores: np.ndarray   # raw Y, 3 x (h * w)


def _rescale(plane: np.ndarray) -> np.ndarray:
    lo, hi = plane.min(), plane.max()
    if hi - lo <= 1e-12:  # flat up to rounding
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)


def color_pca(image) -> ColorPca:
    """Replace the RGB channels of an ``h x w x 3`` image by its three
    principal color components."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidInput(f"expected an h x w x 3 RGB array, got shape {img.shape}")
    if not np.all(np.isfinite(img)) or img.min() < 0 or img.max() > 1:
        raise InvalidInput("pixel values must lie in [0, 1]")
    h, w, _ = img.shape
    samples = img.reshape(-1, 3).T
    model = fit(samples)
    Y = transform(model, samples)
    planes = np.stack([_rescale(Y[k].reshape(h, w)) for k in range(3)])
    return ColorPca(model, planes, Y)
