"""First pipeline pass: per-pixel coverage from registered depth plus
foreground color adjustment, producing a straight-alpha RGBA buffer.

Coverage is 1 at or inside the depth threshold and falls to 0 across a
roll-off band of configurable width: alpha = 1 - s(t) with
s(t) = 3t^2 - 2t^3 and t = clamp((d - threshold) / rolloff, 0, 1). A zero
roll-off degenerates to the hard threshold. Invalid depth samples
(non-finite or <= 0) map to a configurable constant, transparent by default,
so materials the sensor cannot range drop out of the foreground instead of
leaking background into it.

Color-op order on the adjusted layer is fixed: gamma first, then per-channel
gain times exposure gain, then clamp to [0,1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .frames import ColorFrame, DepthFrame
from .prefilter import PrefilterConfig

# closed numeric ranges enforced on MatteParams and mirrored by UI clamps
PARAM_RANGES: dict[str, tuple[float, float]] = {
    "depth_m": (0.0, 5.0),
    "rolloff_m": (0.0, 1.0),
    "exposure_gain": (1.0, 3.0),
    "invalid_depth_alpha": (0.0, 1.0),
}

ADJUST_TARGETS = ("fg", "bg")


@dataclass
class MatteParams:
    """Full tuning state for one rendered frame."""

    depth_m: float = 1.5
    rolloff_m: float = 0.0
    kernel_slider: float = 0.0
    gamma: float = 1.0
    exposure_gain: float = 1.0
    gain_rgb: tuple[float, float, float] = (1.0, 1.0, 1.0)
    adjust_target: str = "fg"
    invalid_depth_alpha: float = 0.0
    prefilter: PrefilterConfig = field(default_factory=PrefilterConfig)

    def __post_init__(self):
        if isinstance(self.prefilter, dict):
            self.prefilter = PrefilterConfig.from_dict(self.prefilter)
        self.gain_rgb = tuple(float(g) for g in self.gain_rgb)
        bad = self.offending_fields()
        if bad:
            raise ValidationError(
                "invalid params: " + "; ".join(bad),
                fields=[b.split(" ", 1)[0] for b in bad],
            )

    def offending_fields(self) -> list[str]:
        """Out-of-range fields as "name allowed-range" strings; empty when valid."""
        bad: list[str] = []
        for name, (lo, hi) in PARAM_RANGES.items():
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and lo <= v <= hi):
                bad.append(f"{name} must be in [{lo}, {hi}]")
        if not (isinstance(self.kernel_slider, (int, float))
                and math.isfinite(self.kernel_slider) and self.kernel_slider >= 0):
            bad.append("kernel_slider must be >= 0")
        if not (isinstance(self.gamma, (int, float))
                and math.isfinite(self.gamma) and self.gamma > 0):
            bad.append("gamma must be > 0")
        if len(self.gain_rgb) != 3 or any(not (math.isfinite(g) and g >= 0)
                                          for g in self.gain_rgb):
            bad.append("gain_rgb must be three values >= 0")
        if self.adjust_target not in ADJUST_TARGETS:
            bad.append(f"adjust_target must be one of {ADJUST_TARGETS}")
        return bad

    def to_dict(self) -> dict:
        return {
            "depth_m": self.depth_m,
            "rolloff_m": self.rolloff_m,
            "kernel_slider": self.kernel_slider,
            "gamma": self.gamma,
            "exposure_gain": self.exposure_gain,
            "gain_rgb": list(self.gain_rgb),
            "adjust_target": self.adjust_target,
            "invalid_depth_alpha": self.invalid_depth_alpha,
            "prefilter": self.prefilter.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MatteParams":
        d = dict(d)
        if "gain_rgb" in d:
            d["gain_rgb"] = tuple(d["gain_rgb"])
        if "prefilter" in d and isinstance(d["prefilter"], dict):
            d["prefilter"] = PrefilterConfig.from_dict(d["prefilter"])
        return cls(**d)

    def replace(self, **changes) -> "MatteParams":
        return replace(self, **changes)

    def color_identity(self) -> bool:
        """True when gamma/gain/exposure leave pixels untouched."""
        return (self.gamma == 1.0 and self.exposure_gain == 1.0
                and self.gain_rgb == (1.0, 1.0, 1.0))


def compute_alpha(depth_m: float, threshold_m: float, rolloff_m: float,
                  invalid_alpha: float = 0.0) -> float:
    """Coverage for one depth sample; total over all float inputs."""
    if threshold_m < 0 or rolloff_m < 0:
        raise ValueError("threshold_m and rolloff_m must be >= 0")
    if not math.isfinite(depth_m) or depth_m <= 0.0:
        return float(invalid_alpha)
    if rolloff_m == 0.0:
        return 1.0 if depth_m <= threshold_m else 0.0
    t = (depth_m - threshold_m) / rolloff_m
    t = min(max(t, 0.0), 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def alpha_map(depths: np.ndarray, threshold_m: float, rolloff_m: float,
              invalid_alpha: float = 0.0) -> np.ndarray:
    """Vectorized compute_alpha over a depth plane; result in the plane's dtype."""
    if threshold_m < 0 or rolloff_m < 0:
        raise ValueError("threshold_m and rolloff_m must be >= 0")
    dt = depths.dtype
    if rolloff_m == 0.0:
        a = (depths <= dt.type(threshold_m)).astype(dt)
    else:
        t = np.clip((depths - dt.type(threshold_m)) / dt.type(rolloff_m),
                    dt.type(0), dt.type(1))
        a = dt.type(1) - t * t * (dt.type(3) - dt.type(2) * t)
    invalid = ~(np.isfinite(depths) & (depths > 0))
    if invalid.any():
        a[invalid] = dt.type(invalid_alpha)
    return a


def apply_gamma(rgb, gamma: float) -> np.ndarray:
    """v -> v**gamma per channel; gamma < 1 brightens, gamma > 1 darkens."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    arr = np.asarray(rgb)
    if gamma == 1.0:
        return arr.copy()
    return np.power(arr, arr.dtype.type(gamma))


def apply_gain(rgb, gain_rgb, exposure_gain: float = 1.0) -> np.ndarray:
    """v -> clamp(v * channel_gain * exposure_gain, 0, 1)."""
    arr = np.asarray(rgb)
    g = np.asarray(gain_rgb, dtype=arr.dtype) * arr.dtype.type(exposure_gain)
    if np.any(g < 0):
        raise ValueError("gains must be >= 0")
    return np.clip(arr * g, arr.dtype.type(0), arr.dtype.type(1))


def adjust_color(rgb: np.ndarray, params: MatteParams) -> np.ndarray:
    """Gamma then gain x exposure then clamp, skipping identity stages."""
    if params.color_identity():
        return rgb
    out = apply_gamma(rgb, params.gamma)
    return apply_gain(out, params.gain_rgb, params.exposure_gain)


def matte_pass(color: ColorFrame, depth_registered: DepthFrame,
               params: MatteParams) -> ColorFrame:
    """Build the straight-alpha RGBA foreground buffer.

    Alpha is compute_alpha mapped over the registered depth plane (no
    cross-pixel coupling); RGB is adjusted only when the foreground is the
    adjustment target.
    """
    if (color.width, color.height) != (depth_registered.width, depth_registered.height):
        raise DimensionMismatch(
            f"color {color.width}x{color.height} vs depth "
            f"{depth_registered.width}x{depth_registered.height}"
        )
    out = np.empty_like(color.pixels)
    rgb = color.rgb
    if params.adjust_target == "fg":
        rgb = adjust_color(rgb, params)
    out[..., :3] = rgb
    a = alpha_map(depth_registered.depths, params.depth_m, params.rolloff_m,
                  params.invalid_depth_alpha)
    out[..., 3] = a.astype(out.dtype, copy=False)
    return ColorFrame(out, frame_index=color.frame_index, timestamp_ns=color.timestamp_ns)
