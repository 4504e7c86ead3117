"""Pixel-domain foundation: 8-bit image buffers, PNG/BMP loading,
luma conversion, the desk-scale alpha-blend morph operator, and the
noise/blur degradations used by the sanity suite.

All operations are pure (noise is seeded) and return new buffers;
``ImageBuffer`` pixel data is frozen after construction, so values can
be shared freely across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import (
    CorruptImageError,
    DimensionMismatchError,
    UnsupportedFormatError,
    ValidationError,
)

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_BMP_MAGIC = b"BM"

# Pillow modes that decode to plain 8-bit rasters we accept.
_PIL_8BIT_MODES = {"L", "LA", "P", "PA", "RGB", "RGBA"}


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """Immutable 8-bit raster, shape (height, width, channels), channels 1 or 3."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.ndim != 3:
            raise ValidationError("pixels must be a (height, width, channels) array")
        if p.dtype != np.uint8:
            raise ValidationError(f"pixels must be uint8, got {p.dtype}")
        h, w, c = p.shape
        if h < 1 or w < 1:
            raise ValidationError(f"image dimensions must be positive, got {w}x{h}")
        if c not in (1, 3):
            raise ValidationError(f"channels must be 1 or 3, got {c}")
        p.setflags(write=False)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ImageBuffer":
        """Build from an (H, W) or (H, W, C) integer array with values in [0, 255]."""
        a = np.asarray(arr)
        if a.ndim == 2:
            a = a[:, :, np.newaxis]
        if a.dtype != np.uint8:
            if not np.issubdtype(a.dtype, np.integer):
                raise ValidationError("pixel array must be integer-valued")
            if a.size and (a.min() < 0 or a.max() > 255):
                raise ValidationError("pixel values outside [0, 255]")
            a = a.astype(np.uint8)
        return cls(np.ascontiguousarray(a))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def samples(self) -> np.ndarray:
        """Row-major flat view of all samples."""
        return self.pixels.reshape(-1)


@dataclass(frozen=True)
class DegradationSpec:
    """Degradation to apply: additive Gaussian noise or Gaussian blur.

    sigma is the noise std-dev in intensity units, or the blur std-dev in
    pixels; sigma = 0 is the identity for either kind.
    """

    kind: str
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian-noise", "gaussian-blur"):
            raise ValidationError(f"unknown degradation kind {self.kind!r}")
        if self.sigma < 0:
            raise ValidationError("sigma must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 unsigned bits")


def quantize_intensities(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], return uint8."""
    rounded = np.copysign(np.floor(np.abs(values) + 0.5), values)
    return np.clip(rounded, 0.0, 255.0).astype(np.uint8)


def load_image(path: str | Path) -> ImageBuffer:
    """Decode a PNG (8-bit variants) or uncompressed 24-bit BMP file.

    Alpha channels are dropped.  The format is sniffed from magic bytes,
    not the file name.
    """
    path = Path(path)
    data = path.read_bytes()
    if data.startswith(_PNG_MAGIC):
        return _decode_png(path)
    if data.startswith(_BMP_MAGIC):
        return _decode_bmp(data)
    raise UnsupportedFormatError(f"{path}: not a PNG or BMP file")


def _decode_png(path: Path) -> ImageBuffer:
    try:
        with Image.open(path) as im:
            if im.format != "PNG":
                raise UnsupportedFormatError(f"{path}: not a PNG payload")
            if im.mode not in _PIL_8BIT_MODES:
                raise UnsupportedFormatError(
                    f"{path}: unsupported PNG mode {im.mode!r} (8-bit only)"
                )
            if im.mode in ("P", "PA"):
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
            if im.mode in ("RGBA", "LA"):
                # drop alpha
                im = im.convert(im.mode[:-1])
            arr = np.asarray(im)
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"{path}: undecodable PNG") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptImageError(f"{path}: corrupt PNG ({exc})") from exc
    return ImageBuffer.from_array(arr)


def _decode_bmp(data: bytes) -> ImageBuffer:
    if len(data) < 54:
        raise CorruptImageError("BMP shorter than its fixed headers")
    data_offset = struct.unpack_from("<I", data, 10)[0]
    dib_size = struct.unpack_from("<I", data, 14)[0]
    if dib_size < 40:
        raise UnsupportedFormatError(f"BMP header size {dib_size} not supported")
    width, height = struct.unpack_from("<ii", data, 18)
    planes, bpp = struct.unpack_from("<HH", data, 26)
    compression = struct.unpack_from("<I", data, 30)[0]
    if planes != 1:
        raise CorruptImageError(f"BMP planes field must be 1, got {planes}")
    if bpp != 24 or compression != 0:
        raise UnsupportedFormatError(
            f"only uncompressed 24-bit BMP supported (got {bpp} bpp, compression {compression})"
        )
    if width <= 0 or height == 0:
        raise CorruptImageError(f"bad BMP dimensions {width}x{height}")
    top_down = height < 0
    rows = abs(height)
    row_size = (3 * width + 3) & ~3  # rows padded to 4 bytes
    if data_offset + row_size * rows > len(data):
        raise CorruptImageError("BMP pixel data truncated")
    raster = np.frombuffer(data, np.uint8, count=row_size * rows, offset=data_offset)
    raster = raster.reshape(rows, row_size)[:, : 3 * width].reshape(rows, width, 3)
    rgb = raster[:, :, ::-1]  # stored BGR
    if not top_down:
        rgb = rgb[::-1]
    return ImageBuffer.from_array(rgb.copy())


def save_png(img: ImageBuffer, path: str | Path) -> None:
    """Write an ImageBuffer as a PNG file."""
    arr = img.pixels[:, :, 0] if img.channels == 1 else img.pixels
    Image.fromarray(arr, mode="L" if img.channels == 1 else "RGB").save(path, "PNG")


def to_luma(img: ImageBuffer) -> ImageBuffer:
    """Convert RGB to single-channel luma (ITU-R BT.601 weights); luma in, luma out."""
    if img.channels == 1:
        return img
    rgb = img.pixels.astype(np.float64)
    y = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return ImageBuffer(quantize_intensities(y)[:, :, np.newaxis])


def alpha_blend_morph(i1: ImageBuffer, i2: ImageBuffer, alpha: float) -> ImageBuffer:
    """Pixel blend: round(alpha*i1 + (1-alpha)*i2), clamped to [0, 255].

    This is the desk-scale morph operator: the result stays close to both
    inputs in pixel space and (for smooth images) in embedding space.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must be in [0, 1], got {alpha}")
    _require_same_shape(i1, i2)
    a = float(alpha)
    blended = a * i1.pixels.astype(np.float64) + (1.0 - a) * i2.pixels.astype(np.float64)
    return ImageBuffer(quantize_intensities(blended))


def gaussian_kernel_2d(sigma: float) -> np.ndarray:
    """Normalized 2D Gaussian kernel of radius ceil(3*sigma)."""
    radius = int(np.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    kernel = np.outer(w, w)
    return kernel / kernel.sum()


def degrade(img: ImageBuffer, spec: DegradationSpec) -> ImageBuffer:
    """Apply a degradation; deterministic for a fixed spec, identity at sigma 0."""
    if spec.sigma == 0:
        return img
    pixels = img.pixels.astype(np.float64)
    if spec.kind == "gaussian-noise":
        rng = np.random.default_rng(spec.seed)
        out = pixels + rng.normal(0.0, spec.sigma, size=pixels.shape)
    else:
        kernel = gaussian_kernel_2d(spec.sigma)
        out = np.empty_like(pixels)
        for c in range(img.channels):
            # reflect padding keeps border statistics flat for SSIM windows
            out[:, :, c] = ndimage.convolve(pixels[:, :, c], kernel, mode="reflect")
    return ImageBuffer(quantize_intensities(out))


def _require_same_shape(a: ImageBuffer, b: ImageBuffer) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatchError(
            f"image shapes differ: {a.width}x{a.height}x{a.channels} "
            f"vs {b.width}x{b.height}x{b.channels}"
        )
