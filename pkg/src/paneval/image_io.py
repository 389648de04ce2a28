"""Decode PNG/JPEG files into normalized single-channel float images.

Color inputs are reduced to luma with Rec. 601 weights; alpha channels are
composited over white first (generated panels routinely ship transparent
backgrounds). 8-bit samples map to [0, 1] by /255, 16-bit PNGs by /65535.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DimensionMismatchError, InvalidInputError

RESIZE_POLICIES = ("strict", "bilinear_to_first")

_16BIT_MODES = ("I;16", "I;16L", "I;16B", "I;16N", "I")


@dataclass(frozen=True)
class ImageBatch:
    """Same-sized grayscale images plus the paths they were decoded from."""

    images: list[np.ndarray]
    source_paths: list[str]

    def __len__(self) -> int:
        return len(self.images)

    @property
    def shape(self) -> tuple[int, int]:
        return self.images[0].shape


def _luma(r, g, b):
    # Integer weights keep pure-channel values exact: (255,0,0) -> 0.299.
    return (299.0 * r + 587.0 * g + 114.0 * b) / 1000.0


def load_gray(path) -> np.ndarray:
    """Decode one PNG/JPEG file to an H x W float64 array in [0, 1]."""
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in _16BIT_MODES:
                arr = np.asarray(img, dtype=np.float64) / 65535.0
                return np.clip(arr, 0.0, 1.0)
            if img.mode == "P":
                img = img.convert("RGBA" if "transparency" in img.info else "RGB")
            if img.mode in ("RGBA", "LA", "PA"):
                rgba = np.asarray(img.convert("RGBA"), dtype=np.float64) / 255.0
                alpha = rgba[..., 3]
                # Composite over white before the luma conversion.
                rgb = rgba[..., :3] * alpha[..., None] + (1.0 - alpha[..., None])
                return np.clip(_luma(rgb[..., 0], rgb[..., 1], rgb[..., 2]), 0.0, 1.0)
            if img.mode == "L":
                return np.asarray(img, dtype=np.float64) / 255.0
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
            return np.clip(_luma(rgb[..., 0], rgb[..., 1], rgb[..., 2]), 0.0, 1.0)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DecodeError(f"could not decode image {path}: {exc}") from exc


def resize_bilinear(img, out_height: int, out_width: int) -> np.ndarray:
    """Bilinear resample with pixel-center alignment, output clipped to [0, 1].

    The interpolation is written in lerp form (a + t*(b-a)) so constant
    images come through exactly unchanged.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a 2-D image, got shape {arr.shape}")
    if out_height < 1 or out_width < 1:
        raise InvalidInputError("output dimensions must be >= 1")
    in_h, in_w = arr.shape
    if (out_height, out_width) == (in_h, in_w):
        return arr.copy()
    ys = np.clip((np.arange(out_height) + 0.5) * (in_h / out_height) - 0.5, 0.0, in_h - 1.0)
    xs = np.clip((np.arange(out_width) + 0.5) * (in_w / out_width) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = arr[np.ix_(y0, x0)]
    top = top + fx * (arr[np.ix_(y0, x1)] - top)
    bottom = arr[np.ix_(y1, x0)]
    bottom = bottom + fx * (arr[np.ix_(y1, x1)] - bottom)
    out = top + fy * (bottom - top)
    return np.clip(out, 0.0, 1.0)


def load_batch(paths, resize_policy: str = "strict", target_shape=None) -> ImageBatch:
    """Decode ``paths`` in order into a batch of same-sized gray images.

    "strict" raises on any dimension mismatch, listing the offending files;
    "bilinear_to_first" resamples every image to the reference size. The
    reference is the first image's size unless ``target_shape`` (an (H, W)
    pair, e.g. another batch's shape) overrides it.
    """
    if resize_policy not in RESIZE_POLICIES:
        raise InvalidInputError(
            f"unknown resize policy {resize_policy!r} (expected one of {RESIZE_POLICIES})"
        )
    paths = [str(p) for p in paths]
    if not paths:
        raise InvalidInputError("load_batch needs at least one path")
    images = [load_gray(p) for p in paths]
    want = tuple(target_shape) if target_shape is not None else images[0].shape
    if resize_policy == "strict":
        offenders = [
            f"{p} is {im.shape[0]}x{im.shape[1]}"
            for p, im in zip(paths, images)
            if im.shape != want
        ]
        if offenders:
            raise DimensionMismatchError(
                f"batch images must all be {want[0]}x{want[1]}: " + "; ".join(offenders)
            )
    else:
        images = [
            im if im.shape == want else resize_bilinear(im, want[0], want[1])
            for im in images
        ]
    return ImageBatch(images=images, source_paths=paths)
