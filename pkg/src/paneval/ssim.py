"""Structural similarity (SSIM) over single-channel images and batches.

Local statistics use a deterministic Gaussian window (canonically 11x11,
sigma 1.5) in valid mode: no padding, so the SSIM map of an H x W pair is
(H-k+1) x (W-k+1). Window means, variances and covariance are the weighted
(biased) estimates with sigma_xy = E[xy] - E[x]E[y], matching the classic
formulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import correlate

from .errors import DimensionMismatchError, InvalidInputError

DEFAULT_WINDOW_SIZE = 11
DEFAULT_SIGMA = 1.5


@dataclass(frozen=True)
class SsimParams:
    """SSIM constants. Defaults are the canonical ones for images in [0, 1]."""

    window_size: int = DEFAULT_WINDOW_SIZE
    sigma: float = DEFAULT_SIGMA
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise InvalidInputError(f"window_size must be odd and >= 1, got {self.window_size}")
        if not self.sigma > 0:
            raise InvalidInputError(f"sigma must be > 0, got {self.sigma}")
        if not (self.k1 > 0 and self.k2 > 0):
            raise InvalidInputError("k1 and k2 must be > 0")
        if not self.dynamic_range > 0:
            raise InvalidInputError("dynamic_range must be > 0")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class SsimResult:
    mean_ssim: float
    ssim_map: np.ndarray


@dataclass(frozen=True)
class PairScore:
    candidate_index: int
    target_index: int
    score: float


@dataclass(frozen=True)
class BatchSsimResult:
    pairs: list[PairScore]
    aggregate: float
    params: SsimParams = field(default=SsimParams())


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """2-D Gaussian window of odd ``size``, normalized to sum to 1."""
    if size < 1 or size % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd and >= 1, got {size}")
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be > 0, got {sigma}")
    g = _gaussian_1d(size, sigma)
    k = np.outer(g, g)
    return k / k.sum()


def _gaussian_1d(size, sigma):
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return w / w.sum()


def _check_image(img, name="image"):
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf pixels")
    return arr


def convolve_valid(img, kernel) -> np.ndarray:
    """Valid-mode 2-D cross-correlation of an image with a kernel."""
    arr = _check_image(img)
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2:
        raise InvalidInputError(f"kernel must be 2-D, got shape {k.shape}")
    if arr.shape[0] < k.shape[0] or arr.shape[1] < k.shape[1]:
        raise InvalidInputError(
            f"image {arr.shape} is smaller than kernel {k.shape}"
        )
    return correlate(arr, k, mode="valid", method="auto")


def _window_mean(img, g):
    # Separable Gaussian: two 1-D valid correlations, much faster than the
    # full 2-D product window at 512x512.
    rows = sliding_window_view(img, g.size, axis=0) @ g
    return sliding_window_view(rows, g.size, axis=1) @ g


def ssim(x, y, params: SsimParams | None = None) -> SsimResult:
    """SSIM map and its mean for two same-sized single-channel images."""
    p = params if params is not None else SsimParams()
    ax = _check_image(x, "x")
    ay = _check_image(y, "y")
    if ax.shape != ay.shape:
        raise DimensionMismatchError(f"image shapes differ: {ax.shape} vs {ay.shape}")
    if ax.shape[0] < p.window_size or ax.shape[1] < p.window_size:
        raise InvalidInputError(
            f"images {ax.shape} are smaller than the {p.window_size}x{p.window_size} window"
        )
    g = _gaussian_1d(p.window_size, p.sigma)
    mu_x = _window_mean(ax, g)
    mu_y = _window_mean(ay, g)
    e_xx = _window_mean(ax * ax, g)
    e_yy = _window_mean(ay * ay, g)
    e_xy = _window_mean(ax * ay, g)
    var_x = e_xx - mu_x * mu_x
    var_y = e_yy - mu_y * mu_y
    cov_xy = e_xy - mu_x * mu_y
    c1, c2 = p.c1, p.c2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov_xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    ssim_map = num / den
    return SsimResult(mean_ssim=float(ssim_map.mean()), ssim_map=ssim_map)


def batch_ssim(candidates, targets, pairing: str = "cross",
               params: SsimParams | None = None) -> BatchSsimResult:
    """SSIM over two image batches.

    ``pairing`` is "cross" (all candidate x target ordered pairs) or
    "indexed" (i-th candidate against i-th target; batch sizes must match).
    The aggregate is the mean of the pair scores in enumeration order.
    """
    p = params if params is not None else SsimParams()
    cands = [_check_image(im, f"candidates[{i}]") for i, im in enumerate(candidates)]
    targs = [_check_image(im, f"targets[{i}]") for i, im in enumerate(targets)]
    if not cands or not targs:
        raise InvalidInputError("batch_ssim needs non-empty candidate and target batches")
    if pairing not in ("cross", "indexed"):
        raise InvalidInputError(f"unknown pairing {pairing!r} (expected 'cross' or 'indexed')")
    if pairing == "indexed" and len(cands) != len(targs):
        raise InvalidInputError(
            f"indexed pairing needs equal batch sizes, got {len(cands)} vs {len(targs)}"
        )
    if pairing == "indexed":
        index_pairs = [(i, i) for i in range(len(cands))]
    else:
        index_pairs = [(i, j) for i in range(len(cands)) for j in range(len(targs))]
    pairs = [
        PairScore(i, j, ssim(cands[i], targs[j], p).mean_ssim) for i, j in index_pairs
    ]
    aggregate = float(np.mean([pr.score for pr in pairs]))
    return BatchSsimResult(pairs=pairs, aggregate=aggregate, params=p)
