"""Positive-definite kernels and Gram matrices.

Point sets are ``d x m`` arrays whose columns are the sample points.

Kernels:

``gaussian``      ``exp(-||x - y||^2 / sigma)`` (sigma divides, no factor 2)
``exponential``   ``exp(-|x - y| / 2)``, Euclidean distance for ``d > 1``
``brownian_min``  ``min(s, t)`` on nonnegative scalars
``linear``        ``<x, y>``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, InvalidState
from .linalg import as_matrix, as_symmetric, as_vector, symmetric_eigh

VARIANTS = ("gaussian", "exponential", "brownian_min", "linear")


@dataclass(frozen=True)
class KernelSpec:
    variant: str
    sigma: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidInput(f"unknown kernel {self.variant!r}; choose from {VARIANTS}")
        if self.variant == "gaussian":
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise InvalidInput("gaussian kernel needs sigma > 0")
        elif self.sigma is not None:
            raise InvalidInput(f"{self.variant} kernel takes no sigma")

    @classmethod
    def gaussian(cls, sigma: float) -> "KernelSpec":
        return cls("gaussian", float(sigma))

    @classmethod
    def exponential(cls) -> "KernelSpec":
        return cls("exponential")

    @classmethod
    def brownian_min(cls) -> "KernelSpec":
        return cls("brownian_min")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    def __str__(self):
        if self.variant == "gaussian":
            return f"gaussian(sigma={self.sigma:g})"
        return self.variant


@dataclass(frozen=True)
class GramMatrix:
    matrix: np.ndarray
    centered: bool = False

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


_DIRECT_LIMIT = 20_000_000


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d, m = A.shape
    p = B.shape[1]
    if d * m * p <= _DIRECT_LIMIT:
        # exact differences keep K(x, x) == 1 and exact symmetry
        diff = A[:, :, None] - B[:, None, :]
        return np.einsum("dij,dij->ij", diff, diff)
    sq = np.sum(A * A, axis=0)[:, None] + np.sum(B * B, axis=0)[None, :] - 2.0 * (A.T @ B)
    return np.maximum(sq, 0.0)


def cross_gram(k: KernelSpec, A, B) -> np.ndarray:
    """Matrix ``(K(a_i, b_j))`` for column point sets ``A`` (d x m), ``B`` (d x p)."""
    A = as_matrix(A, "points")
    B = as_matrix(B, "points")
    if A.shape[0] != B.shape[0]:
        raise InvalidInput(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    v = k.variant
    if v == "linear":
        return A.T @ B
    if v == "brownian_min":
        if A.shape[0] != 1:
            raise InvalidInput("brownian_min kernel is defined on scalars only")
        if np.any(A < 0) or np.any(B < 0):
            raise InvalidInput("brownian_min kernel needs nonnegative inputs")
        return np.minimum(A[0][:, None], B[0][None, :])
    d2 = _sq_dists(A, B)
    if v == "gaussian":
        return np.exp(-d2 / k.sigma)
    return np.exp(-0.5 * np.sqrt(d2))


def eval(k: KernelSpec, x, y) -> float:  # noqa: A001
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape:
        raise InvalidInput(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(cross_gram(k, x[:, None], y[:, None])[0, 0])


def gram(k: KernelSpec, points) -> GramMatrix:
    """Sampled kernel matrix ``(K(x_i, x_j))_{i,j}`` of the columns of ``points``."""
    X = as_matrix(points, "points")
    if X.shape[1] < 1:
        raise InvalidInput("need at least one point")
    G = cross_gram(k, X, X)
    return GramMatrix(0.5 * (G + G.T), centered=False)


def centering_matrix(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def double_center(M: np.ndarray) -> np.ndarray:
    """``J M J`` with ``J = I - (1/n) 11^T``, without forming ``J``."""
    row = M.mean(axis=0, keepdims=True)
    col = M.mean(axis=1, keepdims=True)
    C = M - row - col + M.mean()
    return 0.5 * (C + C.T)


def center_gram(G: GramMatrix) -> GramMatrix:
    if G.centered:
        raise InvalidState("Gram matrix is already centered")
    M = as_symmetric(G.matrix, "gram")
    return GramMatrix(double_center(M), centered=True)


def check_pd(G: GramMatrix | np.ndarray, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is ``>= -tol * max(1, largest)``.

    Eigenvalues come from Jacobi (LAPACK above 128 rows).
    """
    if tol < 0:
        raise InvalidInput("tol must be >= 0")
    M = G.matrix if isinstance(G, GramMatrix) else G
    lam = symmetric_eigh(M).eigenvalues
    return bool(lam[-1] >= -tol * max(1.0, lam[0]))


def parse_kernel(name: str, sigma: float | None = None) -> KernelSpec:
    name = name.replace("-", "_").lower()
    if name == "gaussian":
        return KernelSpec.gaussian(sigma if sigma is not None else 1.0)
    return KernelSpec(name)
