"""Desk-scale reproductions of the two kernel PCA experiments.

* spectral clustering: shell around a ball in R^3, gaussian kernel,
  scored by the best 1-D threshold on PC1 or PC2;
* rotation detection: rotated ellipse images, gaussian kernel, scored by how
  well PC1 follows a sinusoid of period pi in the rotation angle.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import kpca, pca
from .data import gen_rotated_ellipses, gen_shell_ball
from .kernels import KernelSpec


def threshold_accuracy(scores, labels) -> float:
    """Best accuracy of a rule ``score <= c`` / ``score > c`` (either
    orientation) over all cut points ``c``."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    order = np.argsort(s, kind="stable")
    s, y = s[order], y[order]
    n = len(s)
    below1 = np.concatenate([[0], np.cumsum(y)])
    i = np.arange(n + 1)
    valid = np.ones(n + 1, dtype=bool)
    valid[1:n] = s[:-1] < s[1:]
    total1 = below1[-1]
    ones_below = below1 + (n - i) - (total1 - below1)
    ones_above = (i - below1) + (total1 - below1)
    return float(max(ones_below[valid].max(), ones_above[valid].max()) / n)


def best_axis_accuracy(embedding, labels, axes=(0, 1)) -> float:
    E = np.asarray(embedding)
    return max(threshold_accuracy(E[:, a], labels) for a in axes if a < E.shape[1])


def sinusoid_correlation(series, angles, period: float = np.pi) -> float:
    """Pearson correlation between ``series`` and its least-squares fit by
    ``a cos(w t) + b sin(w t) + c`` with ``w = 2 pi / period``."""
    y = np.asarray(series, dtype=float)
    t = np.asarray(angles, dtype=float)
    w = 2 * np.pi / period
    B = np.column_stack([np.cos(w * t), np.sin(w * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(B, y, rcond=None)
    fit = B @ coef
    if np.std(fit) == 0 or np.std(y) == 0:
        return 0.0
    return float(np.corrcoef(y, fit)[0, 1])


@dataclass(frozen=True)
class SpectralClusteringConfig:
    n_shell: int = 200
    n_ball: int = 50
    sigma: float = 0.05
    components: int = 2
    seed: int = 0


@dataclass
class SpectralClusteringResult:
    config: SpectralClusteringConfig
    embedding: np.ndarray
    labels: np.ndarray
    spectrum: np.ndarray
    kpca_accuracy: float
    pca_accuracy: float


def run_spectral_clustering(cfg: SpectralClusteringConfig = SpectralClusteringConfig()) -> SpectralClusteringResult:
    cloud = gen_shell_ball(cfg.n_shell, cfg.n_ball, cfg.seed)
    model = kpca.fit(cloud.points, KernelSpec.gaussian(cfg.sigma), cfg.components)
    emb = kpca.embed_dataset(model)
    lin = pca.fit(cloud.points)
    scores = pca.transform(lin, cloud.points).T
    return SpectralClusteringResult(
        cfg,
        emb,
        cloud.labels,
        model.spectrum,
        best_axis_accuracy(emb, cloud.labels),
        best_axis_accuracy(scores, cloud.labels),
    )


@dataclass(frozen=True)
class RotationConfig:
    n_images: int = 36
    resolution: int = 64
    sigma: float = 300.0
    components: int = 4


@dataclass
class RotationResult:
    config: RotationConfig
    embedding: np.ndarray
    angles: np.ndarray
    spectrum: np.ndarray
    correlations: np.ndarray  # per component


def run_rotation_detection(cfg: RotationConfig = RotationConfig()) -> RotationResult:
    stack = gen_rotated_ellipses(cfg.n_images, cfg.resolution)
    model = kpca.fit(stack.matrix, KernelSpec.gaussian(cfg.sigma), cfg.components)
    emb = kpca.embed_dataset(model)
    corr = np.array([sinusoid_correlation(emb[:, j], stack.angles) for j in range(emb.shape[1])])
    return RotationResult(cfg, emb, stack.angles, model.spectrum, corr)


def config_dict(cfg) -> dict:
    return asdict(cfg)
