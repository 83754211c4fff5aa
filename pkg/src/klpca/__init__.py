"""Linear and kernel PCA, kernel ridge regression, power iteration and
Brownian-covariance tools."""
from .errors import (
    DegenerateStart,
    InvalidInput,
    InvalidState,
    KlpcaError,
    NoConvergence,
    NotPositiveDefinite,
    ParseError,
    SpectralGapTooSmall,
    UsageError,
)
from .kernels import GramMatrix, KernelSpec
from .linalg import SingularDecomposition, SpectralDecomposition

__version__ = "0.1.0"
