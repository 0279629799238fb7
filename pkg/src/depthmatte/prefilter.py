"""Optional noise-reduction stage for noisy input.

Off by default: a capture device's signal processor normally handles
denoising before the pipeline sees pixels, so this stage exists for synthetic
or raw sources. All filters use clamp-to-edge borders, touch RGB only (alpha
passes through), and accumulate in float64 so constant images survive the
round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BadKernel
from .frames import ColorFrame


def _check_ksize(ksize: int) -> None:
    if ksize < 1 or ksize % 2 == 0:
        raise BadKernel(f"kernel size must be odd and >= 1, got {ksize}")


def gaussian_kernel(sigma: float, ksize: int) -> np.ndarray:
    """Sampled, normalized 1D Gaussian; sum is exactly rescaled to 1."""
    r = ksize // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _convolve_axis(plane: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """1D correlation along an axis with edge-replicated borders."""
    r = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    p = np.pad(plane, pad, mode="edge")
    n = plane.shape[axis]
    out = np.zeros_like(plane)
    sl = [slice(None), slice(None)]
    for i, w in enumerate(kernel):
        sl[axis] = slice(i, i + n)
        out += w * p[tuple(sl)]
    return out


def gaussian_blur(img: ColorFrame, sigma: float = 1.0, ksize: int = 5) -> ColorFrame:
    """Separable Gaussian blur per RGB channel."""
    _check_ksize(ksize)
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if ksize == 1:
        return ColorFrame(img.pixels.copy(), img.frame_index, img.timestamp_ns)
    kernel = gaussian_kernel(sigma, ksize)
    out = img.pixels.copy()
    for c in range(3):
        plane = img.pixels[..., c].astype(np.float64)
        plane = _convolve_axis(plane, kernel, axis=0)
        plane = _convolve_axis(plane, kernel, axis=1)
        out[..., c] = plane.astype(out.dtype)
    return ColorFrame(out, img.frame_index, img.timestamp_ns)


def median_blur(img: ColorFrame, ksize: int = 3) -> ColorFrame:
    """Per-channel windowed median."""
    _check_ksize(ksize)
    if ksize == 1:
        return ColorFrame(img.pixels.copy(), img.frame_index, img.timestamp_ns)
    r = ksize // 2
    out = img.pixels.copy()
    for c in range(3):
        p = np.pad(img.pixels[..., c], r, mode="edge")
        windows = sliding_window_view(p, (ksize, ksize))
        out[..., c] = np.median(windows, axis=(2, 3)).astype(out.dtype)
    return ColorFrame(out, img.frame_index, img.timestamp_ns)


def bilateral(img: ColorFrame, radius: int = 4, sigma_color: float = 0.1,
              sigma_space: float = 2.0) -> ColorFrame:
    """Edge-preserving smoothing: Gaussian spatial weight times a Gaussian
    range weight on the Euclidean RGB difference, renormalized per pixel."""
    if radius < 0:
        raise BadKernel(f"radius must be >= 0, got {radius}")
    if sigma_color <= 0 or sigma_space <= 0:
        raise BadKernel("sigma_color and sigma_space must be > 0")
    if radius == 0:
        return ColorFrame(img.pixels.copy(), img.frame_index, img.timestamp_ns)

    rgb = img.pixels[..., :3].astype(np.float64)
    p = np.pad(rgb, ((radius, radius), (radius, radius), (0, 0)), mode="edge")
    h, w = rgb.shape[:2]
    acc = np.zeros_like(rgb)
    wsum = np.zeros((h, w), dtype=np.float64)
    inv2ss = 1.0 / (2.0 * sigma_space * sigma_space)
    inv2sc = 1.0 / (2.0 * sigma_color * sigma_color)
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            ws = np.exp(-(dx * dx + dy * dy) * inv2ss)
            shifted = p[radius + dy:radius + dy + h, radius + dx:radius + dx + w]
            diff = shifted - rgb
            wr = np.exp(-(diff * diff).sum(axis=2) * inv2sc)
            wgt = ws * wr
            acc += wgt[..., None] * shifted
            wsum += wgt
    out = img.pixels.copy()
    out[..., :3] = (acc / wsum[..., None]).astype(out.dtype)
    return ColorFrame(out, img.frame_index, img.timestamp_ns)


@dataclass
class PrefilterConfig:
    """Selectable prefilter stage; kind "none" bypasses it."""

    kind: str = "none"  # none | gaussian | median | bilateral
    gaussian_sigma: float = 1.0
    gaussian_ksize: int = 5
    median_ksize: int = 3
    bilateral_radius: int = 4
    bilateral_sigma_color: float = 0.1
    bilateral_sigma_space: float = 2.0

    KINDS = ("none", "gaussian", "median", "bilateral")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"prefilter.kind must be one of {self.KINDS}, got {self.kind!r}")

    def apply(self, img: ColorFrame) -> ColorFrame:
        if self.kind == "none":
            return img
        if self.kind == "gaussian":
            return gaussian_blur(img, self.gaussian_sigma, self.gaussian_ksize)
        if self.kind == "median":
            return median_blur(img, self.median_ksize)
        return bilateral(img, self.bilateral_radius, self.bilateral_sigma_color,
                         self.bilateral_sigma_space)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "gaussian_sigma": self.gaussian_sigma,
            "gaussian_ksize": self.gaussian_ksize,
            "median_ksize": self.median_ksize,
            "bilateral_radius": self.bilateral_radius,
            "bilateral_sigma_color": self.bilateral_sigma_color,
            "bilateral_sigma_space": self.bilateral_sigma_space,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PrefilterConfig":
        return cls(**d)
