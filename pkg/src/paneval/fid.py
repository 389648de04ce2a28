"""Frechet distance between Gaussian statistics fitted to feature batches.

The cross term Tr((S1 S2)^{1/2}) is evaluated through the similarity
transform S1^{1/2} S2 S1^{1/2}, which is symmetric PSD whenever both inputs
are, so only symmetric square roots are ever taken. Tiny batches (the
5-image protocol) produce rank-deficient covariances at D ~ 2048; the eps*I
regularizer is therefore on by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidInputError,
    NumericError,
)

DEFAULT_EPS = 1e-6

# Residual distances within this of zero are rounding noise and clamp to 0;
# anything more negative is a genuine numeric failure.
NEGATIVE_CLAMP = 1e-6


@dataclass(frozen=True)
class FidOptions:
    eps: float = DEFAULT_EPS
    covariance_mode: str = "full"

    def __post_init__(self):
        if not (np.isfinite(self.eps) and self.eps >= 0):
            raise InvalidInputError(f"eps must be finite and >= 0, got {self.eps}")
        if self.covariance_mode not in ("full", "diagonal"):
            raise InvalidInputError(
                f"covariance_mode must be 'full' or 'diagonal', got {self.covariance_mode!r}"
            )


@dataclass(frozen=True)
class GaussianStats:
    mu: np.ndarray
    sigma: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.mu.size)


def gaussian_stats(features, opts: FidOptions | None = None) -> GaussianStats:
    """Mean and regularized sample covariance of an N x D feature matrix.

    Covariance uses divisor N-1, plus eps on the diagonal. In diagonal mode
    the off-diagonal entries are zeroed before regularization.
    """
    o = opts if opts is not None else FidOptions()
    rows = linalg.as_matrix(features)
    if rows.shape[0] < 2:
        raise InsufficientSamplesError(
            f"gaussian_stats needs at least 2 feature rows, got {rows.shape[0]}"
        )
    mu = linalg.mean_vector(rows)
    sigma = linalg.covariance(rows)
    if o.covariance_mode == "diagonal":
        sigma = np.diag(np.diag(sigma))
    if o.eps > 0:
        sigma = sigma + o.eps * np.eye(sigma.shape[0])
    return GaussianStats(mu=mu, sigma=sigma)


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), clamped at zero.

    Results within -1e-6 of zero clamp to 0; larger negatives raise
    NumericError instead of being hidden.
    """
    mu_a = linalg.as_vector(a.mu)
    mu_b = linalg.as_vector(b.mu)
    sig_a = linalg.as_matrix(a.sigma)
    sig_b = linalg.as_matrix(b.sigma)
    d = mu_a.size
    if mu_b.size != d or sig_a.shape != (d, d) or sig_b.shape != (d, d):
        raise DimensionMismatchError(
            f"stats dims disagree: mu {mu_a.size}/{mu_b.size}, "
            f"sigma {sig_a.shape}/{sig_b.shape}"
        )
    linalg._check_symmetric(sig_b)
    diff = mu_a - mu_b
    root_a = linalg.sqrtm_psd(sig_a)
    inner = root_a @ sig_b @ root_a
    # The product picks up ~1e-13 asymmetry from gemm; symmetrize before the
    # eigenvalue pass so the PSD check sees the intended matrix.
    inner = (inner + inner.T) / 2.0
    tr_cross = linalg.trace_sqrt_psd(inner)
    dist = float(diff @ diff) + linalg.trace(sig_a) + linalg.trace(sig_b) - 2.0 * tr_cross
    if dist < -NEGATIVE_CLAMP:
        raise NumericError(f"Frechet distance evaluated to {dist:.6e} < -{NEGATIVE_CLAMP}")
    return max(dist, 0.0)


def fid(candidates, targets, opts: FidOptions | None = None) -> float:
    """Frechet distance between the Gaussian fits of two feature batches."""
    o = opts if opts is not None else FidOptions()
    rows_c = linalg.as_matrix(candidates)
    rows_t = linalg.as_matrix(targets)
    if rows_c.shape[1] != rows_t.shape[1]:
        raise DimensionMismatchError(
            f"feature dims disagree: {rows_c.shape[1]} vs {rows_t.shape[1]}"
        )
    return frechet_distance(gaussian_stats(rows_c, o), gaussian_stats(rows_t, o))
