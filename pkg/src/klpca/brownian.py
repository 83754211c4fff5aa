"""Brownian min-kernel structure and Monte Carlo checks of Gaussian identities.

On a grid ``0 < x_1 < ... < x_N`` the covariance ``K_N = (min(x_i, x_j))`` has
the exact lower-triangular square root ``A_N`` with entries
``sqrt(x_j - x_{j-1})`` (``x_0 = 0``) on and below the diagonal, and
``det K_N = x_1 (x_2 - x_1) ... (x_N - x_{N-1})``. Paths are sampled as the
finite expansion ``X = A_N Z`` with iid standard normal ``Z``.

Hermite polynomials follow the derivative convention
``(d/dxi)^n exp(-xi^2/2) = H_n(xi) exp(-xi^2/2)``, so ``H_n = (-1)^n He_n``
where ``He_n`` are the usual probabilists' polynomials (``H_1(xi) = -xi``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import NamedTuple

import numpy as np

from . import rng
from .errors import InvalidInput
from .linalg import as_vector

MAX_MOMENT_ORDER = 8
MAX_HERMITE_DEGREE = 20
MAX_MONOMIAL_DEGREE = 4


@dataclass(frozen=True)
class BrownianGrid:
    points: np.ndarray

    def __post_init__(self):
        x = as_vector(self.points, "grid")
        if x.size == 0:
            raise InvalidInput("grid is empty")
        if x[0] <= 0:
            raise InvalidInput("grid points must be strictly positive")
        if np.any(np.diff(x) <= 1e-14):
            raise InvalidInput("grid points must be strictly increasing")
        object.__setattr__(self, "points", x)

    def __len__(self):
        return self.points.shape[0]

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, prepend=0.0)


@dataclass(frozen=True)
class PathEnsemble:
    grid: BrownianGrid
    paths: np.ndarray  # n_paths x N
    seed: int

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]


def min_kernel_matrix(grid: BrownianGrid) -> np.ndarray:
    x = grid.points
    return np.minimum(x[:, None], x[None, :])


def det_closed_form(grid: BrownianGrid) -> float:
    return float(prod(grid.increments))


def cholesky_factor(grid: BrownianGrid) -> np.ndarray:
    """Lower-triangular ``A_N`` with ``A_N A_N^T = K_N``."""
    n = len(grid)
    return np.tril(np.broadcast_to(np.sqrt(grid.increments), (n, n)))


def sample_paths(grid: BrownianGrid, n_paths: int, seed: int = 0) -> PathEnsemble:
    """``n_paths`` draws of ``(X_{x_1}, ..., X_{x_N})``; path ``p`` uses the
    Gaussian substream ``p`` of ``seed`` (see :mod:`klpca.rng`)."""
    if n_paths < 1:
        raise InvalidInput("n_paths must be >= 1")
    Z = rng.gaussian_matrix(seed, n_paths, len(grid))
    paths = Z @ cholesky_factor(grid).T
    return PathEnsemble(grid, paths, int(seed))


# ---------------------------------------------------------------------------
# Monte Carlo estimators


class MCEstimate(NamedTuple):
    value: complex | float
    se: float
    n: int

    def discrepancy(self, target) -> float:
        """``|value - target|`` in standard-error units."""
        diff = abs(self.value - target)
        if self.se == 0.0:
            return 0.0 if diff == 0.0 else float("inf")
        return float(diff / self.se)


def _estimate(samples: np.ndarray) -> MCEstimate:
    n = samples.shape[0]
    mean = samples.mean()
    if n > 1:
        se = float(np.sqrt(np.sum(np.abs(samples - mean) ** 2) / (n - 1) / n))
    else:
        se = float("inf")
    if np.iscomplexobj(samples):
        return MCEstimate(complex(mean), se, n)
    return MCEstimate(float(mean), se, n)


def _column(ens: PathEnsemble, index: int) -> np.ndarray:
    if not 0 <= index < len(ens.grid):
        raise InvalidInput(f"grid index {index} out of range [0, {len(ens.grid)})")
    return ens.paths[:, index]


def mc_char_function(ens: PathEnsemble, k_index: int, j_index: int | None = None) -> MCEstimate:
    """Sample mean of ``exp(i X_s)`` or, with a second index, of
    ``exp(i X_s) exp(-i X_t)``. Targets: ``exp(-s/2)`` and ``exp(-|s-t|/2)``."""
    Xs = _column(ens, k_index)
    if j_index is None:
        return _estimate(np.exp(1j * Xs))
    Xt = _column(ens, j_index)
    return _estimate(np.exp(1j * (Xs - Xt)))


def gaussian_moment(t: float, order: int) -> float:
    """``E X_t^order`` for centered Gaussian with variance ``t``:
    ``(order-1)!! t^(order/2)`` for even order, 0 for odd."""
    if order % 2:
        return 0.0
    n = order // 2
    return float(prod(range(1, order, 2)) * t ** n)


def mc_moment(ens: PathEnsemble, k_index: int, order: int) -> MCEstimate:
    if order % 2 or order < 0:
        raise InvalidInput("moment order must be a nonnegative even integer")
    if order > MAX_MOMENT_ORDER:
        raise InvalidInput(f"moment order above {MAX_MOMENT_ORDER} is too noisy")
    return _estimate(_column(ens, k_index) ** order)


@lru_cache(maxsize=None)
def hermite_coefficients(n: int) -> tuple[int, ...]:
    """Integer coefficients of ``H_n``, lowest power first, built from
    ``H_{n+1} = -xi H_n + H_n'``."""
    if not 0 <= n <= MAX_HERMITE_DEGREE:
        raise InvalidInput(f"Hermite degree must be in [0, {MAX_HERMITE_DEGREE}]")
    if n == 0:
        return (1,)
    prev = hermite_coefficients(n - 1)
    nxt = [0] * (n + 1)
    for p, c in enumerate(prev):
        nxt[p + 1] -= c
        if p:
            nxt[p - 1] += p * c
    return tuple(nxt)


def hermite(n: int, xi: float) -> float:
    out = 0.0
    for c in reversed(hermite_coefficients(n)):
        out = out * xi + c
    return out


def mc_transform(ens: PathEnsemble, t_index: int, F: np.ndarray) -> MCEstimate:
    """Estimate ``T(F)(t) = E(exp(-i X_t) F)`` from per-path values of ``F``."""
    F = np.asarray(F)
    if F.shape != (ens.n_paths,):
        raise InvalidInput("F needs one value per path")
    return _estimate(np.exp(-1j * _column(ens, t_index)) * F)


def mc_semigroup_gap(ens: PathEnsemble, s_index: int, t_index: int, F: np.ndarray) -> MCEstimate:
    """Paired estimate of ``T(F)(t) - exp(-(t-s)/2) T(F)(s)`` for ``F`` measurable
    up to time ``s < t``; the target is 0."""
    if s_index >= t_index:
        raise InvalidInput("need s_index < t_index")
    F = np.asarray(F)
    if F.shape != (ens.n_paths,):
        raise InvalidInput("F needs one value per path")
    Xs, Xt = _column(ens, s_index), _column(ens, t_index)
    s, t = ens.grid.points[s_index], ens.grid.points[t_index]
    return _estimate((np.exp(-1j * Xt) - np.exp(-(t - s) / 2) * np.exp(-1j * Xs)) * F)


def transform_monomial_closed_form(s: float, t: float, n: int) -> complex:
    """``i^n exp(-t/2) s^(n/2) H_n(sqrt(s))``."""
    return complex(1j ** n * np.exp(-t / 2) * s ** (n / 2) * hermite(n, np.sqrt(s)))


class TransformCheck(NamedTuple):
    estimate: MCEstimate
    closed_form: complex
    discrepancy: float


def mc_transform_monomial(ens: PathEnsemble, s_index: int, t_index: int, n: int) -> TransformCheck:
    """Compare the MC estimate of ``T(X_s^n)(t)`` with its closed form."""
    if s_index >= t_index:
        raise InvalidInput("need s_index < t_index")
    if not 0 <= n <= MAX_MONOMIAL_DEGREE:
        raise InvalidInput(f"monomial degree must be in [0, {MAX_MONOMIAL_DEGREE}]")
    Xs = _column(ens, s_index)
    s, t = ens.grid.points[s_index], ens.grid.points[t_index]
    est = mc_transform(ens, t_index, Xs ** n)
    exact = transform_monomial_closed_form(s, t, n)
    return TransformCheck(est, exact, est.discrepancy(exact))
