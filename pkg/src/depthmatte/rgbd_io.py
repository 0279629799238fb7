"""Load/save color images and headerless float32 depth files; synthesize RGB-D scenes.

Depth files are raw little-endian 32-bit floats, row-major, no header; raster
dimensions travel in the dataset manifest (JSON) because the file itself
carries none. The synthetic scene generator stands in for captured subjects so
the whole pipeline runs without a depth camera.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeFailure, IoFailure, SizeMismatch
from .frames import ColorFrame, DepthFrame, to_uint8

COLOR_FPS = 60
FRAME_PERIOD_NS = round(1e9 / COLOR_FPS)


# ---------------------------------------------------------------------------
# Depth files
# ---------------------------------------------------------------------------

def load_depth(path: str | Path, width: int, height: int, frame_index: int = 0) -> DepthFrame:
    """Read a headerless little-endian float32 depth file.

    Raises SizeMismatch when the file length is not width*height*4 bytes,
    IoFailure when the file cannot be read.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read depth file {path}: {exc}") from exc
    expected = width * height * 4
    if len(raw) != expected:
        raise SizeMismatch(
            f"{path}: {len(raw)} bytes, expected {expected} for {width}x{height} float32"
        )
    depths = np.frombuffer(raw, dtype="<f4").reshape(height, width)
    return DepthFrame(depths.copy(), frame_index=frame_index)


def write_depth(frame: DepthFrame, path: str | Path) -> None:
    """Write depths as raw little-endian float32, row-major, no header.

    Storage is transparent: non-finite values are written verbatim.
    """
    data = np.ascontiguousarray(frame.depths, dtype="<f4").tobytes()
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write depth file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Color images
# ---------------------------------------------------------------------------

def load_color(path: str | Path, frame_index: int = 0, timestamp_ns: int = 0) -> ColorFrame:
    """Decode a PNG or JPEG into unit-interval RGBA; missing alpha fills with 1.0."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read image {path}: {exc}") from exc
    try:
        with Image.open(io.BytesIO(raw)) as img:
            rgba = np.asarray(img.convert("RGBA"))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeFailure(f"cannot decode image {path}: {exc}") from exc
    pixels = rgba.astype(np.float32) / np.float32(255.0)
    return ColorFrame(pixels, frame_index=frame_index, timestamp_ns=timestamp_ns)


def save_color(frame: ColorFrame, path: str | Path) -> None:
    """Write a frame as PNG (the only write format)."""
    img = Image.fromarray(to_uint8(frame), mode="RGBA")
    try:
        img.save(Path(path), format="PNG")
    except OSError as exc:
        raise IoFailure(f"cannot write image {path}: {exc}") from exc


def encode_color(frame: ColorFrame, format: str = "png") -> bytes:
    """Encode a frame to PNG or JPEG bytes (JPEG drops alpha)."""
    fmt = format.lower()
    buf = io.BytesIO()
    rgba = to_uint8(frame)
    if fmt == "png":
        Image.fromarray(rgba, mode="RGBA").save(buf, format="PNG")
    elif fmt in ("jpg", "jpeg"):
        Image.fromarray(rgba[..., :3], mode="RGB").save(buf, format="JPEG", quality=90)
    else:
        raise ValueError(f"unsupported encode format {format!r}")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Dataset manifest
# ---------------------------------------------------------------------------

@dataclass
class ManifestEntry:
    color: str
    depth: str
    depth_width: int
    depth_height: int


@dataclass
class DatasetManifest:
    """Ordered list of (color, depth) file pairs plus an optional background image.

    Paths are stored relative to the manifest location.
    """

    entries: list[ManifestEntry] = field(default_factory=list)
    background: str | None = None

    def to_dict(self) -> dict:
        d = {"entries": [asdict(e) for e in self.entries]}
        if self.background is not None:
            d["background"] = self.background
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        entries = [ManifestEntry(**e) for e in d.get("entries", [])]
        return cls(entries=entries, background=d.get("background"))

    def verify(self, base_dir: str | Path) -> None:
        """Check every entry's depth file size against its declared dimensions."""
        base = Path(base_dir)
        for e in self.entries:
            p = base / e.depth
            try:
                size = p.stat().st_size
            except OSError as exc:
                raise IoFailure(f"missing depth file {p}") from exc
            expected = e.depth_width * e.depth_height * 4
            if size != expected:
                raise SizeMismatch(f"{p}: {size} bytes, expected {expected}")


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc}") from exc
    try:
        return DatasetManifest.from_dict(json.loads(text))
    except (json.JSONDecodeError, TypeError) as exc:
        raise DecodeFailure(f"malformed manifest {path}: {exc}") from exc


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write manifest {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Synthetic scenes
# ---------------------------------------------------------------------------

@dataclass
class SceneSpec:
    """A moving subject in front of a flat background, at desk scale.

    Depths are in meters and must sit inside the sensor's effective range
    (0, 5]. The subject slides horizontally by round(frame_index * velocity)
    color pixels per frame; the depth raster holds the same silhouette scaled
    to its own resolution.
    """

    subject_shape: str = "ellipse"  # "ellipse" | "rectangle"
    subject_depth_m: float = 1.0
    background_depth_m: float = 3.0
    velocity_px_per_frame: float = 0.0
    subject_color: tuple[float, float, float] = (0.85, 0.2, 0.15)
    noise_sigma: float = 0.0
    color_width: int = 192
    color_height: int = 256
    depth_width: int = 192
    depth_height: int = 256
    subject_center_frac: tuple[float, float] = (0.5, 0.5)
    subject_radius_frac: tuple[float, float] = (0.18, 0.24)
    background_color: tuple[float, float, float] = (0.12, 0.12, 0.14)
    noise_seed: int = 0

    def __post_init__(self):
        if self.subject_shape not in ("ellipse", "rectangle"):
            raise ValueError(f"unknown subject_shape {self.subject_shape!r}")
        for name, d in (("subject_depth_m", self.subject_depth_m),
                        ("background_depth_m", self.background_depth_m)):
            if not (0.0 < d <= 5.0):
                raise ValueError(f"{name} must be in (0, 5], got {d}")
        if not self.subject_depth_m < self.background_depth_m:
            raise ValueError("subject_depth_m must be less than background_depth_m")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        for name, v in (("color_width", self.color_width), ("color_height", self.color_height),
                        ("depth_width", self.depth_width), ("depth_height", self.depth_height)):
            if v < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        d = dict(d)
        for key in ("subject_color", "subject_center_frac", "subject_radius_frac",
                    "background_color"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def subject_offset_px(spec: SceneSpec, frame_index: int) -> int:
    """Horizontal subject offset in color pixels at a given frame."""
    return round(frame_index * spec.velocity_px_per_frame)


def silhouette_mask(spec: SceneSpec, frame_index: int, width: int, height: int) -> np.ndarray:
    """Rasterize the subject silhouette at an arbitrary raster size.

    The offset is defined in color pixels and rescaled by width/color_width,
    so silhouettes at color and depth resolution stay registered.
    """
    offset = subject_offset_px(spec, frame_index) * (width / spec.color_width)
    cx = spec.subject_center_frac[0] * width + offset
    cy = spec.subject_center_frac[1] * height
    rx = max(spec.subject_radius_frac[0] * width, 0.5)
    ry = max(spec.subject_radius_frac[1] * height, 0.5)
    ys = np.arange(height, dtype=np.float64)[:, None]
    xs = np.arange(width, dtype=np.float64)[None, :]
    if spec.subject_shape == "ellipse":
        return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    return (np.abs(xs - cx) <= rx) & (np.abs(ys - cy) <= ry)


def synth_scene(spec: SceneSpec, frame_index: int) -> tuple[ColorFrame, DepthFrame]:
    """Render one synthetic frame pair, deterministic in (spec, frame_index).

    Gaussian pixel noise (sigma = noise_sigma) is added to color RGB only;
    depth holds exactly {subject_depth_m, background_depth_m}.
    """
    mask_c = silhouette_mask(spec, frame_index, spec.color_width, spec.color_height)
    pixels = np.empty((spec.color_height, spec.color_width, 4), dtype=np.float32)
    pixels[..., :3] = np.asarray(spec.background_color, dtype=np.float32)
    pixels[mask_c, :3] = np.asarray(spec.subject_color, dtype=np.float32)
    pixels[..., 3] = 1.0
    if spec.noise_sigma > 0:
        rng = np.random.default_rng((spec.noise_seed, frame_index))
        noise = rng.normal(0.0, spec.noise_sigma, size=pixels[..., :3].shape)
        pixels[..., :3] = np.clip(pixels[..., :3] + noise.astype(np.float32), 0.0, 1.0)

    mask_d = silhouette_mask(spec, frame_index, spec.depth_width, spec.depth_height)
    depths = np.full((spec.depth_height, spec.depth_width), spec.background_depth_m,
                     dtype=np.float32)
    depths[mask_d] = np.float32(spec.subject_depth_m)

    color = ColorFrame(pixels, frame_index=frame_index,
                       timestamp_ns=frame_index * FRAME_PERIOD_NS)
    depth = DepthFrame(depths, frame_index=frame_index)
    return color, depth
