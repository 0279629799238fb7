"""Hardware-independent real-time RGB-D background removal and compositing.

Two-pass core: a matte pass turns registered depth into straight-alpha
coverage (hard threshold or smoothstep roll-off) with foreground color
adjustment, and a refine pass closes the coverage channel morphologically
and mixes the result over a replacement background. Around it: raster IO in
a headerless float32 depth format, a 60/30 fps stream simulator, a latency
benchmark harness, and a WebSocket tuning service with a browser console.
"""

from .align import center_crop_scale, register_pair, upscale_depth
from .bench import run_bench
from .errors import (BadKernel, BadTarget, BindFailure, DecodeFailure,
                     DepthMatteError, DimensionMismatch, IoFailure,
                     SizeMismatch, SourceExhausted, ValidationError)
from .frames import AlphaMask, ColorFrame, DepthFrame
from .matte import (MatteParams, alpha_map, apply_gain, apply_gamma,
                    compute_alpha, matte_pass)
from .prefilter import PrefilterConfig, bilateral, gaussian_blur, median_blur
from .refine import close_alpha, composite, dilate, erode, kernel_from_slider
from .rgbd_io import (DatasetManifest, SceneSpec, load_color, load_depth,
                      save_color, synth_scene, write_depth)
from .service import TuningService, apply_update, params_hash
from .stream import (BUDGET_NS, DatasetSource, FrameTimings, SyntheticSource,
                     measure_lag, run_stream, schedule)

__version__ = "0.1.0"

__all__ = [
    "AlphaMask", "BadKernel", "BadTarget", "BindFailure", "BUDGET_NS",
    "ColorFrame", "DatasetManifest", "DatasetSource", "DecodeFailure",
    "DepthFrame", "DepthMatteError", "DimensionMismatch", "FrameTimings",
    "IoFailure", "MatteParams", "PrefilterConfig", "SceneSpec", "SizeMismatch",
    "SourceExhausted", "SyntheticSource", "TuningService", "ValidationError",
    "alpha_map", "apply_gain", "apply_gamma", "apply_update", "bilateral",
    "center_crop_scale", "close_alpha", "composite", "compute_alpha", "dilate",
    "erode", "gaussian_blur", "kernel_from_slider", "load_color", "load_depth",
    "matte_pass", "measure_lag", "median_blur", "params_hash", "register_pair",
    "run_bench", "run_stream", "save_color", "schedule", "synth_scene",
    "upscale_depth", "write_depth",
]
