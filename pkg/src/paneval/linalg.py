"""Dense real vector/matrix helpers: means, covariances, traces, cosine
similarity, and the symmetric-PSD matrix square root.

All functions work on float64 numpy arrays and are pure: no shared state,
safe to call from any number of threads. Inputs are validated for shape and
finiteness on every call; dimensions here are small enough that this never
dominates.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidInputError,
    NotPsdError,
)

DEFAULT_NEG_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    """Validate and return ``v`` as a finite 1-D float64 array of dim >= 1."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("vector contains NaN or Inf entries")
    return arr


def as_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a finite 2-D float64 array, R,C >= 1."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return arr


def mean_vector(rows) -> np.ndarray:
    """Column-wise arithmetic mean of an N x D matrix, as a length-D vector."""
    arr = as_matrix(rows)
    return arr.mean(axis=0)


def covariance(rows) -> np.ndarray:
    """Sample covariance (divisor N-1) of the rows of an N x D matrix.

    The result is exactly symmetric and its diagonal is non-negative.
    Raises InsufficientSamplesError when fewer than two rows are given.
    """
    arr = as_matrix(rows)
    n = arr.shape[0]
    if n < 2:
        raise InsufficientSamplesError(f"covariance needs at least 2 rows, got {n}")
    centered = arr - arr.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    # gemm output is not guaranteed symmetric; enforce it.
    return (cov + cov.T) / 2.0


def trace(a) -> float:
    """Sum of the diagonal of a square matrix."""
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"trace needs a square matrix, got {arr.shape}")
    return float(np.trace(arr))


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Raises DimensionMismatchError on unequal dims and DegenerateInputError
    when either vector has zero norm.
    """
    uu = as_vector(u)
    vv = as_vector(v)
    if uu.shape != vv.shape:
        raise DimensionMismatchError(
            f"cosine_similarity dims differ: {uu.size} vs {vv.size}"
        )
    nu = float(np.linalg.norm(uu))
    nv = float(np.linalg.norm(vv))
    if nu == 0.0 or nv == 0.0:
        raise DegenerateInputError("cosine_similarity is undefined for zero-norm vectors")
    c = float(uu @ vv) / (nu * nv)
    return min(1.0, max(-1.0, c))


def _check_symmetric(arr, rel_tol=1e-8):
    norm = float(np.linalg.norm(arr))
    if float(np.linalg.norm(arr - arr.T)) > rel_tol * max(norm, 1e-300):
        raise InvalidInputError("matrix is not symmetric within 1e-8 relative")


def _clamped_sqrt_eigvals(eigvals, neg_tol):
    """Square roots of eigenvalues with the shared negative-clamping rule.

    Eigenvalues in [-neg_tol * spectral_norm, 0) are treated as rounding noise
    and clamped to zero; anything more negative means the matrix is not PSD.
    """
    floor = -neg_tol * float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    low = float(np.min(eigvals))
    if low < floor:
        raise NotPsdError(
            f"eigenvalue {low:.6e} below the PSD tolerance {floor:.6e}"
        )
    return np.sqrt(np.clip(eigvals, 0.0, None))


def sqrtm_psd(a, neg_tol: float = DEFAULT_NEG_TOL) -> np.ndarray:
    """Symmetric square root S of a symmetric PSD matrix A, with S @ S ~= A.

    Uses a symmetric eigendecomposition. Eigenvalues within
    ``-neg_tol * ||A||_2`` of zero are clamped to zero before the square
    root; more negative eigenvalues raise NotPsdError. Asymmetric input
    (beyond 1e-8 relative) raises InvalidInputError.
    """
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"sqrtm_psd needs a square matrix, got {arr.shape}")
    if not np.isfinite(neg_tol) or neg_tol < 0:
        raise InvalidInputError("neg_tol must be a finite non-negative real")
    _check_symmetric(arr)
    sym = (arr + arr.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    roots = _clamped_sqrt_eigvals(eigvals, neg_tol)
    s = (eigvecs * roots) @ eigvecs.T
    return (s + s.T) / 2.0


def trace_sqrt_psd(a, neg_tol: float = DEFAULT_NEG_TOL) -> float:
    """Tr(A^{1/2}) for symmetric PSD A, without forming the root.

    Same clamping semantics as sqrtm_psd; only eigenvalues are computed,
    which matters at D ~ 2048.
    """
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"trace_sqrt_psd needs a square matrix, got {arr.shape}")
    _check_symmetric(arr)
    eigvals = np.linalg.eigvalsh((arr + arr.T) / 2.0)
    return float(np.sum(_clamped_sqrt_eigvals(eigvals, neg_tol)))
