"""Multivariate Gaussian estimation, closed-form KL divergence, and the
reference-based sliding KL profile.

All linear algebra goes through Cholesky factors of the (optionally
ridge-regularized) covariance; explicit inverses and raw determinants are
never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InsufficientDataError, NumericalError, ToolkitError

__all__ = ["GaussianModel", "fit_gaussian", "kl_gaussian", "kl_profile"]

_KL_CLIP = 1e-9


@dataclass(frozen=True)
class GaussianModel:
    """Sample mean/covariance with a cached Cholesky factor.

    chol factors cov + ridge*I; degenerate marks covariances that were
    not positive definite before regularization.
    """

    mean: np.ndarray
    cov: np.ndarray
    n: int
    chol: np.ndarray
    ridge: float
    degenerate: bool

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def log_det(self) -> float:
        """Log-determinant of the regularized covariance."""
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))


def _auto_ridge(cov: np.ndarray) -> float:
    d = cov.shape[0]
    return max(1e-9, 1e-6 * float(np.trace(cov)) / d)


def fit_gaussian(samples, ridge: float | str = "auto") -> GaussianModel:
    """Fit mean and unbiased covariance; factorize with a ridge on the diagonal.

    ridge="auto" uses max(1e-9, 1e-6 * trace(cov)/d); pass 0.0 to factor
    the raw covariance (fails on singular input).
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ToolkitError("samples must be a 2-D array of row vectors")
    n, d = x.shape
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples to fit a Gaussian, got {n}")
    if not np.isfinite(x).all():
        raise ToolkitError("samples contain non-finite values")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    cov = 0.5 * (cov + cov.T)
    degenerate = False
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        degenerate = True
    eps = _auto_ridge(cov) if ridge == "auto" else float(ridge)
    try:
        chol = np.linalg.cholesky(cov + eps * np.eye(d))
    except np.linalg.LinAlgError:
        raise NumericalError(
            "covariance is not positive definite even after ridge regularization"
        ) from None
    return GaussianModel(mean=mean, cov=cov, n=n, chol=chol, ridge=eps, degenerate=degenerate)


def kl_gaussian(g0: GaussianModel, g1: GaussianModel) -> float:
    """Closed-form D_KL(N0 || N1) between two Gaussian models.

    0.5 * ( tr(S1^-1 S0) + (m1-m0)^T S1^-1 (m1-m0) - d + ln det S1 - ln det S0 )
    evaluated through the cached Cholesky factors.
    """
    if g0.dim != g1.dim:
        raise ToolkitError(f"dimension mismatch: {g0.dim} vs {g1.dim}")
    d = g0.dim
    # tr(S1^-1 S0) = ||L1^-1 L0||_F^2 with S = L L^T
    z = solve_triangular(g1.chol, g0.chol, lower=True)
    trace_term = float(np.sum(z * z))
    if not math.isfinite(trace_term):
        raise NumericalError("non-finite trace term in KL divergence")
    y = solve_triangular(g1.chol, g1.mean - g0.mean, lower=True)
    quad_term = float(y @ y)
    if not math.isfinite(quad_term):
        raise NumericalError("non-finite quadratic term in KL divergence")
    logdet_term = g1.log_det() - g0.log_det()
    if not math.isfinite(logdet_term):
        raise NumericalError("non-finite log-determinant term in KL divergence")
    kl = 0.5 * (trace_term + quad_term - d + logdet_term)
    if kl < 0.0:
        if kl < -_KL_CLIP:
            raise NumericalError(f"KL divergence is negative beyond tolerance: {kl}")
        kl = 0.0
    return kl


def kl_profile(
    stream,
    ref_len: int = 1600,
    window: int = 1600,
    step: int = 1600,
    reverse: bool = False,
    ridge: float | str = "auto",
) -> list[tuple[int, float]]:
    """Sliding KL divergence of local windows against an initial reference.

    The reference Gaussian is fitted on the first ref_len vectors; each
    subsequent window of the given size yields one (start_index, kl)
    pair.  Default orientation is D(ref || local); reverse swaps the
    arguments.
    """
    x = np.asarray(stream, dtype=float)
    if x.ndim != 2:
        raise ToolkitError("stream must be a 2-D array of row vectors")
    if x.shape[0] < ref_len + window:
        raise InsufficientDataError(
            f"stream of {x.shape[0]} vectors is shorter than ref_len + window = {ref_len + window}"
        )
    ref = fit_gaussian(x[:ref_len], ridge=ridge)
    profile = []
    for start in range(ref_len, x.shape[0] - window + 1, step):
        local = fit_gaussian(x[start : start + window], ridge=ridge)
        kl = kl_gaussian(local, ref) if reverse else kl_gaussian(ref, local)
        profile.append((start, kl))
    return profile
