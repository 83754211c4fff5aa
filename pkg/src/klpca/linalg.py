"""Dense symmetric linear algebra.

Matrices are plain ``numpy`` float arrays. Two eigensolvers live here:

* :func:`jacobi_eigh`, a cyclic Jacobi solver used as the reference oracle,
* :func:`power_iteration` / :func:`top_k_spectrum`, the iterate-and-deflate
  scheme whose results are checked against it.

:func:`symmetric_eigh` is the workhorse used by the model code; it runs Jacobi
on small inputs and LAPACK on large ones, with identical output conventions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateStart,
    InvalidInput,
    NoConvergence,
    SpectralGapTooSmall,
)

SIGN_ZERO_TOL = 1e-12
RANK_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_AUTO_LIMIT = 128

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending; column ``j`` of ``eigenvectors`` is the
    unit eigenvector belonging to ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.eigenvalues)

    def truncate(self, k: int) -> "SpectralDecomposition":
        return SpectralDecomposition(self.eigenvalues[:k].copy(), self.eigenvectors[:, :k].copy())

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class SingularDecomposition:
    """Factorisation ``LL* = U D^2 U^T`` of a Gramian.

    ``coefficients`` holds ``U D^{-1}``: column ``j`` gives the weights with
    which the frame vectors combine into the ``j``-th right singular vector,
    i.e. ``W = L* U D^{-1}`` without ever forming ``W``.
    """

    U: np.ndarray
    D: np.ndarray
    coefficients: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.D)


class PowerResult(NamedTuple):
    value: float
    vector: np.ndarray


# ---------------------------------------------------------------------------
# validation helpers


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} contains NaN or Inf")
    return A


def as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise InvalidInput(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInput(f"{name} contains NaN or Inf")
    return v


def as_symmetric(M, name: str = "matrix", rtol: float = 1e-12) -> np.ndarray:
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {A.shape}")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if A.size and np.max(np.abs(A - A.T)) > rtol * scale:
        raise InvalidInput(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def fix_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry with ``|v| > 1e-12`` is positive."""
    V = np.array(V, dtype=float, copy=True)
    for j in range(V.shape[1]):
        nz = np.flatnonzero(np.abs(V[:, j]) > SIGN_ZERO_TOL)
        if nz.size and V[nz[0], j] < 0:
            V[:, j] = -V[:, j]
    return V


def _fix_sign(v: np.ndarray) -> np.ndarray:
    return fix_signs(v[:, None])[:, 0]


def hs_norm(M) -> float:
    """Hilbert-Schmidt (Frobenius) norm, ``sqrt(sum M_ij^2)``."""
    A = as_matrix(M)
    return float(np.sqrt(np.sum(A * A)))


def _sorted(values, vectors) -> SpectralDecomposition:
    order = np.argsort(-values, kind="stable")
    return SpectralDecomposition(values[order].copy(), fix_signs(vectors[:, order]))


# ---------------------------------------------------------------------------
# Jacobi


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Circle-method schedule: ``m - 1`` rounds of ``m / 2`` disjoint pairs
    covering every index pair exactly once."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        P, Q = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            P.append(min(p, q))
            Q.append(max(p, q))
        rounds.append((np.array(P), np.array(Q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(M, tol: float = 1e-14) -> SpectralDecomposition:
    """Cyclic Jacobi eigensolver for a symmetric matrix.

    Rotations are applied in parallel (round-robin) order, so every round
    annihilates ``n/2`` disjoint off-diagonal pairs at once. Iteration stops
    when the off-diagonal HS norm falls below ``tol * ||M||_HS`` or a sweep
    finds nothing left to rotate.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    A = as_symmetric(M)
    n = A.shape[0]
    if n == 0:
        raise InvalidInput("empty matrix")
    scale = hs_norm(A)
    if n == 1 or scale == 0.0:
        return _sorted(np.diag(A).copy(), np.eye(n))

    m = n + (n % 2)
    if m != n:
        A = np.pad(A, ((0, 1), (0, 1)))
    V = np.eye(m)
    rounds = _round_robin(m)
    skip = max(tol * scale / m, 8 * _EPS * scale)

    converged = False
    for _ in range(JACOBI_MAX_SWEEPS):
        off = hs_norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            converged = True
            break
        rotated = False
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > skip
            if not active.any():
                continue
            rotated = True
            if not active.all():
                P, Q, apq = P[active], Q[active], apq[active]
            tau = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # one round as a dense rotation J: A <- J^T A J, V <- V J
            J = np.eye(m)
            J[P, P] = c
            J[Q, Q] = c
            J[P, Q] = s
            J[Q, P] = -s
            A = J.T @ A @ J
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            V = V @ J
        if not rotated:
            converged = True
            break
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    # the padding index never rotates, so it occupies the last slot untouched
    return _sorted(np.diag(A)[:n].copy(), V[:n, :n])


def symmetric_eigh(M, solver: str = "auto") -> SpectralDecomposition:
    """Eigen-decomposition with the library's ordering and sign conventions.

    ``solver`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    128 rows, LAPACK above).
    """
    A = as_symmetric(M)
    if solver == "auto":
        solver = "jacobi" if A.shape[0] <= JACOBI_AUTO_LIMIT else "lapack"
    if solver == "jacobi":
        return jacobi_eigh(A)
    if solver == "lapack":
        if A.shape[0] == 0:
            raise InvalidInput("empty matrix")
        w, V = np.linalg.eigh(A)
        return _sorted(w, V)
    raise InvalidInput(f"unknown solver {solver!r}")


# ---------------------------------------------------------------------------
# power iteration


def _power_steps(G: np.ndarray, x0: np.ndarray, n: int):
    """Yield ``(ratio_k, unit G^k x0)`` for k = 1..n where
    ``ratio_k = ||G^{k+1} x0|| / ||G^k x0||``."""
    norm_x = np.linalg.norm(x0)
    if norm_x <= 1e-300:
        raise InvalidInput("start vector is zero")
    floor = 1e-13 * max(hs_norm(G), 1e-300)
    y = x0 / norm_x
    Gy = G @ y
    for _ in range(n):
        g = np.linalg.norm(Gy)
        if g <= floor:
            raise DegenerateStart("iterate vanished: start vector is orthogonal to the range")
        y = Gy / g
        Gy = G @ y
        yield float(np.linalg.norm(Gy)), y


def power_iteration(G, x0, n: int) -> PowerResult:
    """Estimate the top eigenpair of a symmetric PSD matrix.

    The value is the norm ratio ``||G^{n+1} x0|| / ||G^n x0||`` and the vector
    is ``G^n x0`` normalised (sign convention applied).
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    A = as_symmetric(G)
    x = as_vector(x0, "x0")
    if x.shape[0] != A.shape[0]:
        raise InvalidInput("x0 length does not match G")
    ratio, y = None, None
    for ratio, y in _power_steps(A, x, n):
        pass
    return PowerResult(ratio, _fix_sign(y))


def power_ratio_history(G, x0, n: int) -> list[float]:
    """Ratio estimates after 1, 2, ..., n steps."""
    A = as_symmetric(G)
    x = as_vector(x0, "x0")
    if x.shape[0] != A.shape[0]:
        raise InvalidInput("x0 length does not match G")
    return [r for r, _ in _power_steps(A, x, n)]


def top_k_spectrum(
    G,
    k: int,
    n_steps: int = 2000,
    gap_tol: float = 1e-8,
    residual_tol: float = 1e-10,
    x0=None,
) -> SpectralDecomposition:
    """Top ``k`` eigenpairs by power iteration with deflation.

    After ``j`` pairs are found the iteration runs on ``Q_j^perp G Q_j^perp``.
    One pair beyond ``k`` is probed (when available) so that a vanishing gap
    ``lambda_k - lambda_{k+1}`` is detected and refused. ``x0`` seeds the
    first pair; later pairs start from fixed pseudo-random vectors.
    """
    A = as_symmetric(G)
    dim = A.shape[0]
    if not 1 <= k <= dim:
        raise InvalidInput(f"k must be in [1, {dim}]")
    scale = max(hs_norm(A), 1e-300)
    count = min(k + 1, dim)
    starts = np.random.default_rng(0).standard_normal((count, dim))
    if x0 is not None:
        starts[0] = as_vector(x0, "x0")

    Q = np.zeros((dim, 0))
    values: list[float] = []
    for x0 in starts:
        P = np.eye(dim) - Q @ Q.T
        Gd = P @ A @ P
        y = P @ x0
        if np.linalg.norm(y) <= 1e-12 * np.linalg.norm(x0):
            raise DegenerateStart("start vector lies in the deflated subspace")
        y /= np.linalg.norm(y)
        if hs_norm(Gd) <= 1e-14 * scale:
            lam = 0.0
        else:
            lam = float(y @ Gd @ y)
            for _step in range(n_steps):
                z = Gd @ y
                z -= Q @ (Q.T @ z)
                nz = np.linalg.norm(z)
                if nz <= 1e-14 * scale:
                    lam = 0.0
                    break
                y = z / nz
                lam = float(y @ Gd @ y)
                if np.linalg.norm(Gd @ y - lam * y) <= residual_tol * scale:
                    break
            else:
                raise SpectralGapTooSmall(
                    f"no convergence after {n_steps} steps (eigenvalue ratio too close to 1)"
                )
        values.append(lam)
        Q = np.column_stack([Q, _fix_sign(y)])

    lam = np.array(values)
    gaps = lam[:-1] - lam[1:]
    limit = gap_tol * max(abs(lam[0]), 1e-300)
    bad = np.flatnonzero(gaps[: min(k, len(gaps))] <= limit)
    if bad.size:
        j = bad[0]
        raise SpectralGapTooSmall(
            f"eigenvalues {j + 1} and {j + 2} coincide ({lam[j]:.6g}, {lam[j + 1]:.6g})"
        )
    return SpectralDecomposition(lam[:k], Q[:, :k])


# ---------------------------------------------------------------------------
# Gram-based SVD


def gram_svd(gramian, rank_tol: float = RANK_TOL, solver: str = "auto") -> SingularDecomposition:
    """``U, D`` with ``LL* = U D^2 U^T`` from the Gramian ``LL*``.

    Modes whose eigenvalue ``D_j^2`` does not exceed ``rank_tol`` times the
    largest eigenvalue are dropped.
    """
    spec = symmetric_eigh(gramian, solver=solver)
    lam = spec.eigenvalues
    top = lam[0] if lam.size else 0.0
    keep = lam > max(rank_tol * top, 0.0) if top > 0 else np.zeros_like(lam, dtype=bool)
    U = spec.eigenvectors[:, keep]
    D = np.sqrt(lam[keep])
    return SingularDecomposition(U, D, U / D)
