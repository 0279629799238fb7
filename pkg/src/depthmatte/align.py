"""Register the depth raster to the color raster.

Depth is upscaled to color resolution (never color downscaled to depth) with
half-pixel-centered sampling and clamp-to-edge, the usual GPU sampler
convention: output pixel x samples the source at (x + 0.5) / scale - 0.5.
Invalid depth samples (non-finite or <= 0) propagate: any tap contributing
with positive weight poisons the interpolated result rather than being
averaged into fabricated geometry at silhouette edges.
"""

from __future__ import annotations

import numpy as np

from .errors import BadTarget
from .frames import ColorFrame, DepthFrame


def _axis_coords(src_n: int, dst_n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-axis taps for half-pixel-centered bilinear: (i0, i1, weight of i1)."""
    s = (np.arange(dst_n, dtype=np.float64) + 0.5) * (src_n / dst_n) - 0.5
    i0 = np.clip(np.floor(s).astype(np.intp), 0, src_n - 1)
    i1 = np.minimum(i0 + 1, src_n - 1)
    w = np.clip(s - np.floor(s), 0.0, 1.0)
    # clamp-to-edge: samples past either end collapse onto the edge texel
    w[s < 0] = 0.0
    w[s > src_n - 1] = 0.0
    return i0, i1, w


def resample_bilinear(plane: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Separable bilinear resample of one 2D plane, clamp-to-edge."""
    sh, sw = plane.shape
    if target_w == sw and target_h == sh:
        return plane.copy()
    x0, x1, wx = _axis_coords(sw, target_w)
    y0, y1, wy = _axis_coords(sh, target_h)
    wx = wx.astype(plane.dtype)
    wy = wy.astype(plane.dtype)[:, None]
    c0 = np.take(plane, x0, axis=1)
    c1 = np.take(plane, x1, axis=1)
    cols = c0 + wx * (c1 - c0)
    r0 = np.take(cols, y0, axis=0)
    r1 = np.take(cols, y1, axis=0)
    return r0 + wy * (r1 - r0)


def resample_nearest(plane: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Nearest-neighbor resample with the same half-pixel center convention."""
    sh, sw = plane.shape
    sx = (np.arange(target_w, dtype=np.float64) + 0.5) * (sw / target_w) - 0.5
    sy = (np.arange(target_h, dtype=np.float64) + 0.5) * (sh / target_h) - 0.5
    xi = np.clip(np.rint(sx).astype(np.intp), 0, sw - 1)
    yi = np.clip(np.rint(sy).astype(np.intp), 0, sh - 1)
    return np.take(np.take(plane, xi, axis=1), yi, axis=0)


def upscale_depth(depth: DepthFrame, target_w: int, target_h: int,
                  mode: str = "linear") -> DepthFrame:
    """Upscale a depth raster to (target_w, target_h).

    Linear mode interpolates valid samples and marks a pixel NaN whenever any
    positively-weighted tap is invalid; nearest mode picks the closest sample
    verbatim. Raises BadTarget when the target is smaller than the source.
    """
    if target_w < depth.width or target_h < depth.height:
        raise BadTarget(
            f"target {target_w}x{target_h} smaller than source {depth.width}x{depth.height}"
        )
    if mode == "nearest":
        return DepthFrame(resample_nearest(depth.depths, target_w, target_h),
                          frame_index=depth.frame_index)
    if mode != "linear":
        raise ValueError(f"unknown mode {mode!r}")

    d = depth.depths
    valid = np.isfinite(d) & (d > 0)
    if valid.all():
        return DepthFrame(resample_bilinear(d, target_w, target_h),
                          frame_index=depth.frame_index)

    # interpolate over sanitized values, then invalidate any output that drew
    # positive weight from an invalid tap
    safe = np.where(valid, d, d.dtype.type(0))
    out = resample_bilinear(safe, target_w, target_h)

    x0, x1, wx = _axis_coords(d.shape[1], target_w)
    y0, y1, wy = _axis_coords(d.shape[0], target_h)
    v0 = np.take(valid, x0, axis=1)
    v1 = np.take(valid, x1, axis=1)
    cols_ok = np.where(wx > 0, v0 & v1, v0)
    r0 = np.take(cols_ok, y0, axis=0)
    r1 = np.take(cols_ok, y1, axis=0)
    ok = np.where(wy[:, None] > 0, r0 & r1, r0)
    out[~ok] = np.nan
    return DepthFrame(out, frame_index=depth.frame_index)


def crop_box(src_w: int, src_h: int, target_w: int, target_h: int) -> tuple[int, int, int, int]:
    """Centered (x0, y0, w, h) crop of the source to the target aspect ratio."""
    if src_w * target_h > src_h * target_w:
        crop_w = max(1, round(src_h * target_w / target_h))
        crop_h = src_h
    elif src_w * target_h < src_h * target_w:
        crop_w = src_w
        crop_h = max(1, round(src_w * target_h / target_w))
    else:
        crop_w, crop_h = src_w, src_h
    x0 = (src_w - crop_w) // 2
    y0 = (src_h - crop_h) // 2
    return x0, y0, crop_w, crop_h


def center_crop_scale(color: ColorFrame, target_w: int, target_h: int) -> ColorFrame:
    """Center-crop to the target aspect ratio, then bilinearly resample."""
    x0, y0, cw, ch = crop_box(color.width, color.height, target_w, target_h)
    cropped = color.pixels[y0:y0 + ch, x0:x0 + cw]
    if cw == target_w and ch == target_h:
        return ColorFrame(cropped.copy(), frame_index=color.frame_index,
                          timestamp_ns=color.timestamp_ns)
    out = np.empty((target_h, target_w, 4), dtype=color.pixels.dtype)
    for c in range(4):
        out[..., c] = resample_bilinear(np.ascontiguousarray(cropped[..., c]),
                                        target_w, target_h)
    return ColorFrame(out, frame_index=color.frame_index, timestamp_ns=color.timestamp_ns)


def register_pair(color: ColorFrame, depth: DepthFrame,
                  mode: str = "linear") -> tuple[ColorFrame, DepthFrame]:
    """Bring a (color, depth) pair onto one grid: crop color to the depth
    aspect ratio, then upscale depth to the cropped color resolution."""
    x0, y0, cw, ch = crop_box(color.width, color.height, depth.width, depth.height)
    if (cw, ch) != (color.width, color.height):
        color = ColorFrame(color.pixels[y0:y0 + ch, x0:x0 + cw],
                           frame_index=color.frame_index, timestamp_ns=color.timestamp_ns)
    if (depth.width, depth.height) != (cw, ch):
        depth = upscale_depth(depth, cw, ch, mode=mode)
    return color, depth
