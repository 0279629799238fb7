"""Second pipeline pass: grayscale morphological close on the coverage
channel, then background color adjustment and the final mix.

The close is dilation (windowed max) followed by erosion (windowed min) with
the same k x k square window and clamp-to-edge borders. It runs as two full
sub-passes with a barrier between them: the dilated plane is materialized
completely before the erosion reads it, because each output pixel depends on
its neighbors' finished values. Grayscale max/min (not binary) so fractional
coverage from the roll-off survives; on binary masks it reduces to the
binary close.

Fast path: a square window is separable, so each sub-pass is a row sweep then
a column sweep of shifted in-place max/min accumulations. Clamp-to-edge is
equivalent to truncating the window at the border for max/min (replicated
edge values never change the extreme), so no padding is needed. Work grows
linearly with k. The naive O(k^2) reference lives in the test suite.
"""

from __future__ import annotations

import threading

import numpy as np

from .errors import BadKernel, DimensionMismatch
from .frames import AlphaMask, ColorFrame
from .matte import MatteParams, adjust_color

KERNEL_SIZES = (0, 3, 5, 7, 9)

# Sub-pass intermediates are served from per-thread scratch so the hot path
# never round-trips the allocator (large fresh buffers fault their pages in
# every frame otherwise). Only the returned result is a fresh array.
_scratch = threading.local()


def _scratch_pair(shape: tuple[int, ...], dtype) -> tuple[np.ndarray, np.ndarray]:
    store = getattr(_scratch, "bufs", None)
    if store is None:
        store = _scratch.bufs = {}
    key = (shape, np.dtype(dtype).str)
    pair = store.get(key)
    if pair is None:
        pair = store[key] = (np.empty(shape, dtype), np.empty(shape, dtype))
    return pair


def kernel_from_slider(v: float) -> int:
    """Map a continuous slider value to the implemented kernel sizes:
    [0,3) disables smoothing, [3,5) selects 3x3, [5,7) 5x5, [7,9) 7x7,
    anything >= 9 the largest 9x9 window."""
    if v < 3.0:
        return 0
    if v < 5.0:
        return 3
    if v < 7.0:
        return 5
    if v < 9.0:
        return 7
    return 9


def _check_kernel(k: int) -> None:
    if k not in KERNEL_SIZES:
        raise BadKernel(f"kernel must be one of {KERNEL_SIZES}, got {k}")


def _slide_axis(src: np.ndarray, k: int, axis: int, op, out: np.ndarray) -> np.ndarray:
    """Windowed extreme of width k along one axis, window truncated at edges.

    Writes into `out`, which must not alias `src`.
    """
    r = k // 2
    np.copyto(out, src)
    n = src.shape[axis]
    full = [slice(None)] * src.ndim
    for o in range(1, r + 1):
        lo = list(full)
        hi = list(full)
        lo[axis] = slice(o, n)
        hi[axis] = slice(0, n - o)
        op(out[tuple(lo)], src[tuple(hi)], out=out[tuple(lo)])
        op(out[tuple(hi)], src[tuple(lo)], out=out[tuple(hi)])
    return out


def _buffers_for(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b1, b2 = _scratch_pair(plane.shape, plane.dtype)
    if plane is b1 or plane is b2:  # defensive; scratch never leaves this module
        return np.empty_like(plane), np.empty_like(plane)
    return b1, b2


def dilate_plane(plane: np.ndarray, k: int) -> np.ndarray:
    _check_kernel(k)
    if k == 0:
        return plane.copy()
    b1, _ = _buffers_for(plane)
    out = np.empty_like(plane)
    _slide_axis(plane, k, 0, np.maximum, b1)
    return _slide_axis(b1, k, 1, np.maximum, out)


def erode_plane(plane: np.ndarray, k: int) -> np.ndarray:
    _check_kernel(k)
    if k == 0:
        return plane.copy()
    b1, _ = _buffers_for(plane)
    out = np.empty_like(plane)
    _slide_axis(plane, k, 0, np.minimum, b1)
    return _slide_axis(b1, k, 1, np.minimum, out)


def close_plane(plane: np.ndarray, k: int) -> np.ndarray:
    _check_kernel(k)
    if k == 0:
        return plane.copy()
    b1, b2 = _buffers_for(plane)
    _slide_axis(plane, k, 0, np.maximum, b1)
    _slide_axis(b1, k, 1, np.maximum, b2)  # dilation complete before erosion reads it
    _slide_axis(b2, k, 0, np.minimum, b1)
    out = np.empty_like(plane)
    return _slide_axis(b1, k, 1, np.minimum, out)


def dilate(mask: AlphaMask, k: int) -> AlphaMask:
    """Windowed max with a k x k square window."""
    return AlphaMask(dilate_plane(mask.values, k))


def erode(mask: AlphaMask, k: int) -> AlphaMask:
    """Windowed min with a k x k square window."""
    return AlphaMask(erode_plane(mask.values, k))


def close_alpha(mask: AlphaMask, k: int) -> AlphaMask:
    """Morphological close; k = 0 bypasses the operation."""
    return AlphaMask(close_plane(mask.values, k))


def composite(fg: ColorFrame, bg: ColorFrame, params: MatteParams) -> ColorFrame:
    """Mix the straight-alpha foreground over the replacement background.

    out_rgb = fg_rgb * a + bg_rgb * (1 - a), output alpha 1. When the
    background is the adjustment target its pixels get the gamma/gain
    treatment first.
    """
    if (fg.width, fg.height) != (bg.width, bg.height):
        raise DimensionMismatch(
            f"fg {fg.width}x{fg.height} vs bg {bg.width}x{bg.height}"
        )
    bg_rgb = bg.rgb
    if params.adjust_target == "bg":
        bg_rgb = adjust_color(bg_rgb, params)
    a = fg.alpha[..., None]
    out = np.empty_like(fg.pixels)
    out[..., :3] = fg.rgb * a + bg_rgb * (1 - a)
    out[..., 3] = 1.0
    return ColorFrame(out, frame_index=fg.frame_index, timestamp_ns=fg.timestamp_ns)
