"""RGB raster container, image file I/O and Gaussian pre-smoothing."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

DEFAULT_SIGMA = 2.0


class DecodeError(ValueError):
    """Raised when a file exists but cannot be decoded as a raster image."""


@dataclass(frozen=True, eq=False)
class RasterImage:
    """A width x height grid of RGB triples stored as float64.

    ``pixels`` has shape ``(height, width, 3)``; its C-order flattening is the
    row-major pixel sequence.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must have shape (height, width, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 255.0:
            raise ValueError("channel values must lie in [0, 255]")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def filled(cls, width: int, height: int, rgb) -> RasterImage:
        px = np.empty((height, width, 3), dtype=np.float64)
        px[...] = rgb
        return cls(px)

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.pixels), 0, 255).astype(np.uint8)


def load_image(path) -> RasterImage:
    """Decode a JPEG/PNG/PPM (or anything Pillow reads) into a RasterImage.

    Missing or unreadable files raise ``OSError``; files that cannot be decoded
    raise :class:`DecodeError`.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        try:
            with Image.open(fh) as im:
                im.load()
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
        except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
            raise DecodeError(f"cannot decode {path!r}: {exc}") from exc
    return RasterImage(rgb)


def save_image(img: RasterImage | np.ndarray, path) -> None:
    """Write an image as PNG or binary PPM, chosen by file extension.

    Float channels are rounded to 8 bits on write.
    """
    data = img.to_uint8() if isinstance(img, RasterImage) else np.asarray(img, dtype=np.uint8)
    ext = os.path.splitext(os.fspath(path))[1].lower()
    fmt = {".png": "PNG", ".ppm": "PPM"}.get(ext)
    if fmt is None:
        raise ValueError(f"unsupported output extension {ext!r} (use .png or .ppm)")
    Image.fromarray(data, mode="RGB").save(path, format=fmt)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled 1-D Gaussian with radius ceil(3*sigma), normalized to sum 1."""
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _convolve_axis(data: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0)] * data.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(data, pad, mode="edge")
    n = data.shape[axis]
    out = np.zeros_like(data)
    for i, w in enumerate(kernel):
        out += w * np.take(padded, np.arange(i, i + n), axis=axis)
    return out


def gaussian_smooth(img: RasterImage, sigma: float = DEFAULT_SIGMA) -> RasterImage:
    """Separable per-channel Gaussian blur with clamp-to-edge borders.

    ``sigma == 0`` returns an identical copy.
    """
    if not sigma >= 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return RasterImage(img.pixels.copy())
    kernel = gaussian_kernel(sigma)
    out = _convolve_axis(img.pixels, kernel, axis=1)
    out = _convolve_axis(out, kernel, axis=0)
    # rounding can push a convex combination a few ulps outside [0, 255]
    return RasterImage(np.clip(out, 0.0, 255.0))
