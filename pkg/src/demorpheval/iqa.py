"""Reference image-quality kernels: PSNR and Gaussian-windowed SSIM.

SSIM follows the standard configuration (11x11 Gaussian window, sigma 1.5,
k1 0.01, k2 0.03, dynamic range 255), computed on luma over valid window
positions only, in float64 on unnormalized [0, 255] intensities.  PSNR is
computed over all channels jointly; a zero-MSE pair returns +inf, which
reports as the 100 dB cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError, ImageTooSmallError, ValidationError
from .images import ImageBuffer, to_luma

PSNR_CAP_DB = 100.0


class IqaKind(Enum):
    SSIM = "ssim"
    PSNR = "psnr"


@dataclass(frozen=True)
class SsimParams:
    window_size: int = 11
    gaussian_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValidationError("window_size must be odd and >= 3")
        if min(self.gaussian_sigma, self.k1, self.k2, self.dynamic_range) <= 0:
            raise ValidationError("gaussian_sigma, k1, k2, dynamic_range must be positive")


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images are identical."""
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatchError(
            f"psnr operands differ: {a.pixels.shape} vs {b.pixels.shape}"
        )
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 20.0 * math.log10(255.0 / math.sqrt(mse))


def cap_psnr(value: float) -> float:
    """Clamp PSNR to the 100 dB reporting ceiling (maps the +inf sentinel)."""
    return min(value, PSNR_CAP_DB)


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian taps centered on the window."""
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return w / w.sum()


def _windowed(field: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable weighted window sums at all valid (non-padded) positions."""
    r = len(taps) // 2
    out = ndimage.correlate1d(field, taps, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, taps, axis=1, mode="nearest")
    return out[r:-r, r:-r]


def ssim(a: ImageBuffer, b: ImageBuffer, params: SsimParams = SsimParams()) -> float:
    """Mean SSIM index over all valid window positions, on luma."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"ssim operands differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    if min(a.width, a.height) < params.window_size:
        raise ImageTooSmallError(
            f"image {a.width}x{a.height} smaller than {params.window_size}-pixel window"
        )
    x = to_luma(a).pixels[:, :, 0].astype(np.float64)
    y = to_luma(b).pixels[:, :, 0].astype(np.float64)
    taps = gaussian_window(params.window_size, params.gaussian_sigma)

    mu_x = _windowed(x, taps)
    mu_y = _windowed(y, taps)
    var_x = _windowed(x * x, taps) - mu_x * mu_x
    var_y = _windowed(y * y, taps) - mu_y * mu_y
    cov = _windowed(x * y, taps) - mu_x * mu_y

    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    ssim_map = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    )
    return float(min(1.0, max(-1.0, np.mean(ssim_map))))
