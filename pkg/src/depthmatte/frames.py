"""Raster containers shared across the pipeline.

All color math runs on unit-interval floats; quantization to 8-bit happens
only at save/encode time. Frames are treated as immutable after construction
and can be handed freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _require_plane(a: np.ndarray, name: str) -> None:
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2D (height, width) array, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} dimensions must be >= 1, got {a.shape}")
    if not np.issubdtype(a.dtype, np.floating):
        raise ValueError(f"{name} must hold floats, got dtype {a.dtype}")


@dataclass
class ColorFrame:
    """Row-major RGBA raster; channels are unit-interval intensities.

    `pixels` has shape (height, width, 4). Callers that build frames from
    arbitrary data can run `validate()` to assert the range invariant; the
    pipeline itself keeps channels in [0,1] by construction.
    """

    pixels: np.ndarray
    frame_index: int = 0
    timestamp_ns: int = 0

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 4:
            raise ValueError(f"pixels must have shape (h, w, 4), got {self.pixels.shape}")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError(f"frame dimensions must be >= 1, got {self.pixels.shape[:2]}")
        if not np.issubdtype(self.pixels.dtype, np.floating):
            raise ValueError(f"pixels must hold floats, got dtype {self.pixels.dtype}")
        if self.frame_index < 0:
            raise ValueError("frame_index must be nonnegative")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def rgb(self) -> np.ndarray:
        return self.pixels[..., :3]

    @property
    def alpha(self) -> np.ndarray:
        return self.pixels[..., 3]

    def validate(self) -> None:
        lo = float(self.pixels.min())
        hi = float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"channels outside [0,1]: min={lo}, max={hi}")


@dataclass
class DepthFrame:
    """Row-major raster of depths in meters.

    Valid samples are finite and > 0; non-finite or <= 0 samples are allowed
    in storage and treated as invalid downstream.
    """

    depths: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        self.depths = np.asarray(self.depths)
        _require_plane(self.depths, "depths")
        if self.frame_index < 0:
            raise ValueError("frame_index must be nonnegative")

    @property
    def width(self) -> int:
        return self.depths.shape[1]

    @property
    def height(self) -> int:
        return self.depths.shape[0]

    def valid_mask(self) -> np.ndarray:
        return np.isfinite(self.depths) & (self.depths > 0)


@dataclass
class AlphaMask:
    """Per-pixel coverage in [0,1] at the composite resolution."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        _require_plane(self.values, "values")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def to_uint8(frame: ColorFrame) -> np.ndarray:
    """Quantize unit-interval RGBA to uint8, round-to-nearest."""
    return (np.clip(frame.pixels, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def from_uint8(rgba: np.ndarray, frame_index: int = 0, timestamp_ns: int = 0) -> ColorFrame:
    pixels = np.asarray(rgba, dtype=np.float32) / np.float32(255.0)
    return ColorFrame(pixels, frame_index=frame_index, timestamp_ns=timestamp_ns)
