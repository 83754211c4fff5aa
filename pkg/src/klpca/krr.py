"""Closed-form kernel ridge regression.

Minimises ``sum_i |y_i - f(t_i)|^2 + beta ||f||_{H(K)}^2`` over the RKHS.
The minimiser is ``F = sum_i c_i K(., t_i)`` with ``c = (K_m + beta I)^{-1} y``,
so the fitted values are ``(beta I + K_m)^{-1} K_m y``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import InvalidInput, NotPositiveDefinite
from .kernels import KernelSpec, cross_gram, gram
from .linalg import as_matrix, as_vector


@dataclass(frozen=True)
class KrrModel:
    sample_points: np.ndarray
    coefficients: np.ndarray
    beta: float
    kernel: KernelSpec

    @property
    def fitted(self) -> np.ndarray:
        return cross_gram(self.kernel, self.sample_points, self.sample_points) @ self.coefficients


def _check(points, y, beta):
    T = as_matrix(points, "points")
    y = as_vector(y, "y")
    if T.shape[1] < 1:
        raise InvalidInput("need at least one sample point")
    if y.shape[0] != T.shape[1]:
        raise InvalidInput(f"{T.shape[1]} points but {y.shape[0]} targets")
    if not (np.isfinite(beta) and beta > 0):
        raise InvalidInput("beta must be positive")
    return T, y


def regularized_system(K: np.ndarray, beta: float) -> np.ndarray:
    return K + beta * np.eye(K.shape[0])


def solve_spd(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        factor = cho_factor(M, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NotPositiveDefinite(f"K_m + beta I is not positive definite: {exc}") from None
    return cho_solve(factor, b, check_finite=False)


def fit(points, y, beta: float, kernel: KernelSpec) -> KrrModel:
    T, y = _check(points, y, beta)
    K = gram(kernel, T).matrix
    c = solve_spd(regularized_system(K, beta), y)
    return KrrModel(T, c, float(beta), kernel)


def predict(model: KrrModel, x) -> float | np.ndarray:
    """``F(x) = sum_i c_i K(x, t_i)`` for one point, or for each column of a
    ``d x p`` array."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    X = arr.reshape(-1, 1) if single else as_matrix(arr, "x")
    if X.shape[0] != model.sample_points.shape[0]:
        raise InvalidInput(
            f"expected {model.sample_points.shape[0]}-dimensional points, got {X.shape[0]}"
        )
    out = cross_gram(model.kernel, X, model.sample_points) @ model.coefficients
    return float(out[0]) if single else out


def objective(points, y, beta: float, kernel: KernelSpec, a) -> float:
    """``||y - K_m a||^2 + beta a^T K_m a`` for ``f = sum_i a_i K(., t_i)``."""
    T, y = _check(points, y, beta)
    a = as_vector(a, "a")
    K = gram(kernel, T).matrix
    r = y - K @ a
    return float(r @ r + beta * a @ K @ a)


def objective_gradient(points, y, beta: float, kernel: KernelSpec, a) -> np.ndarray:
    """Gradient in ``a``: ``2 K_m ((K_m + beta I) a - y)``."""
    T, y = _check(points, y, beta)
    a = as_vector(a, "a")
    K = gram(kernel, T).matrix
    return 2.0 * K @ (regularized_system(K, beta) @ a - y)
