"""Live tuning service: streams composited frames and per-stage timings over
a WebSocket while accepting parameter updates, the stand-in for an on-device
slider surface.

Wire protocol:
  client -> server (text JSON): {"type":"set_params","params":{...partial...}},
    {"type":"select_background","name":...}, {"type":"pause"}, {"type":"resume"}
  server -> client (text JSON): {"type":"timings",...}, {"type":"params_ack",
    "hash":...,"params":{...},"kernel_band":...}, {"type":"error","fields":[...]}
  server -> client (binary): 8-byte header (uint32 LE frame_index, uint32 LE
    params hash) followed by the encoded composite (PNG by default, JPEG via
    the `format` query parameter at connect time).

Each connection gets its own pipeline loop and parameter state; the loop
samples the latest params once per frame, so a frame never blends two tuning
states. With real-time pacing the loop targets 60 Hz and drops frames when
rendering or the client falls behind; nothing queues unboundedly.
"""

from __future__ import annotations

import asyncio
import json
import logging
import struct
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.concurrency import run_in_threadpool
from fastapi.staticfiles import StaticFiles

from .align import center_crop_scale, register_pair
from .errors import BindFailure, ValidationError
from .frames import ColorFrame
from .matte import MatteParams
from .refine import kernel_from_slider
from .rgbd_io import encode_color
from .stream import FrameOutput, FrameSource, neutral_background, process_pair

logger = logging.getLogger("depthmatte.service")

TARGET_FPS = 60


def params_hash(params: MatteParams) -> int:
    """Stable 32-bit hash of a params snapshot (canonical JSON, CRC-32)."""
    blob = json.dumps(params.to_dict(), sort_keys=True, separators=(",", ":")).encode()
    return zlib.crc32(blob) & 0xFFFFFFFF


_FIELDS = ("depth_m", "rolloff_m", "kernel_slider", "gamma", "exposure_gain",
           "gain_rgb", "adjust_target", "invalid_depth_alpha", "prefilter")


def apply_update(current: MatteParams, update: dict) -> MatteParams:
    """Merge a partial update into `current`, rejecting atomically.

    Fields absent from the update are unchanged; any out-of-range or unknown
    field rejects the whole message and leaves `current` untouched.
    """
    if not isinstance(update, dict):
        raise ValidationError("params update must be a JSON object", fields=[])
    unknown = [k for k in update if k not in _FIELDS]
    if unknown:
        raise ValidationError(f"unknown fields: {', '.join(sorted(unknown))}",
                              fields=sorted(unknown))
    merged = current.to_dict()
    for k, v in update.items():
        if k == "prefilter":
            if not isinstance(v, dict):
                raise ValidationError("prefilter must be an object", fields=["prefilter"])
            merged["prefilter"] = {**merged["prefilter"], **v}
        else:
            merged[k] = v
    try:
        return MatteParams.from_dict(merged)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), fields=sorted(update)) from exc


# ---------------------------------------------------------------------------
# Backgrounds
# ---------------------------------------------------------------------------

def make_background(name: str, width: int = 640, height: int = 480) -> ColorFrame:
    """Procedural replacement backgrounds for device-free operation."""
    px = np.empty((height, width, 4), dtype=np.float32)
    px[..., 3] = 1.0
    if name == "slate":
        px[..., :3] = (0.18, 0.2, 0.23)
    elif name == "gradient":
        ramp = np.linspace(0.05, 0.75, height, dtype=np.float32)[:, None]
        px[..., 0] = ramp * 0.4
        px[..., 1] = ramp * 0.6
        px[..., 2] = ramp
    elif name == "checker":
        ys, xs = np.mgrid[0:height, 0:width]
        cells = ((xs // 32 + ys // 32) % 2).astype(np.float32)
        px[..., :3] = (0.25 + 0.5 * cells)[..., None]
    else:
        raise KeyError(name)
    return ColorFrame(px)


def default_backgrounds() -> dict[str, ColorFrame]:
    return {name: make_background(name) for name in ("slate", "gradient", "checker")}


# ---------------------------------------------------------------------------
# Per-connection session
# ---------------------------------------------------------------------------

@dataclass
class _Session:
    params: MatteParams
    paused: bool = False
    background_name: Optional[str] = None
    background_reg: Optional[ColorFrame] = None
    depth_cache: Optional[tuple[int, object]] = None


class TuningService:
    """Builds the FastAPI app; one pipeline worker per WebSocket session."""

    def __init__(self,
                 source_factory: Callable[[], FrameSource],
                 backgrounds: dict[str, ColorFrame] | None = None,
                 initial_params: MatteParams | None = None,
                 realtime: bool = True,
                 static_dir: str | Path | None = None):
        self.source_factory = source_factory
        self.backgrounds = backgrounds if backgrounds is not None else default_backgrounds()
        self.initial_params = initial_params or MatteParams()
        self.realtime = realtime
        self.static_dir = Path(static_dir) if static_dir else None

    # -- synchronous render, called from a worker thread -------------------

    def _render(self, source: FrameSource, session: _Session, frame_idx: int,
                snapshot: MatteParams, fmt: str) -> FrameOutput:
        color = source.color(frame_idx)
        depth_idx = frame_idx // 2
        if session.depth_cache is not None and session.depth_cache[0] == depth_idx:
            depth = session.depth_cache[1]
        else:
            depth = source.depth(depth_idx)
            session.depth_cache = (depth_idx, depth)
        if session.background_reg is None:
            color_reg, _ = register_pair(color, depth)
            bg = (self.backgrounds[session.background_name]
                  if session.background_name else source.background())
            if bg is None:
                session.background_reg = neutral_background(color_reg.width, color_reg.height)
            else:
                session.background_reg = center_crop_scale(bg, color_reg.width,
                                                           color_reg.height)
        return process_pair(color, depth, session.background_reg, snapshot,
                            encoder=lambda f: encode_color(f, fmt))

    # -- message handling ---------------------------------------------------

    def _handle(self, session: _Session, raw: str) -> Optional[dict]:
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict):
                raise ValueError("not an object")
        except ValueError:
            return {"type": "error", "fields": [], "message": "malformed message"}
        kind = msg.get("type")
        if kind == "set_params":
            try:
                session.params = apply_update(session.params, msg.get("params", {}))
            except ValidationError as exc:
                return {"type": "error", "fields": exc.fields, "message": str(exc)}
            return {
                "type": "params_ack",
                "hash": params_hash(session.params),
                "params": session.params.to_dict(),
                "kernel_band": kernel_from_slider(session.params.kernel_slider),
            }
        if kind == "select_background":
            name = msg.get("name")
            if name not in self.backgrounds:
                return {"type": "error", "fields": ["name"],
                        "message": f"unknown background {name!r}"}
            session.background_name = name
            session.background_reg = None
            return None
        if kind == "pause":
            session.paused = True
            return None
        if kind == "resume":
            session.paused = False
            return None
        return {"type": "error", "fields": ["type"], "message": f"unknown type {kind!r}"}

    # -- frame pump -----------------------------------------------------------

    async def _send_loop(self, ws: WebSocket, source: FrameSource,
                         session: _Session, fmt: str) -> None:
        frame_idx = 0
        start = time.perf_counter()
        try:
            while True:
                if session.paused:
                    await asyncio.sleep(0.02)
                    continue
                if self.realtime:
                    # drop frames when rendering or the client lags the clock
                    due = int((time.perf_counter() - start) * TARGET_FPS)
                    frame_idx = max(frame_idx, due)
                snapshot = session.params
                h = params_hash(snapshot)
                out = await run_in_threadpool(self._render, source, session,
                                              frame_idx, snapshot, fmt)
                await ws.send_bytes(struct.pack("<II", out.frame_index & 0xFFFFFFFF, h)
                                    + out.encoded)
                await ws.send_text(json.dumps({"type": "timings",
                                               **out.timings.to_dict()}))
                frame_idx += 1
                if self.realtime:
                    delay = start + frame_idx / TARGET_FPS - time.perf_counter()
                    if delay > 0:
                        await asyncio.sleep(delay)
        except (WebSocketDisconnect, asyncio.CancelledError):
            pass
        except Exception:
            logger.exception("session pipeline stopped")

    # -- app ------------------------------------------------------------------

    def build_app(self) -> FastAPI:
        app = FastAPI(title="depthmatte tuning service")
        service = self

        @app.get("/healthz")
        async def healthz():
            return {"status": "ok"}

        @app.get("/backgrounds")
        async def backgrounds():
            return {"backgrounds": sorted(service.backgrounds)}

        @app.websocket("/ws")
        async def ws_endpoint(ws: WebSocket):
            await ws.accept()
            fmt = ws.query_params.get("format", "png").lower()
            if fmt not in ("png", "jpeg", "jpg"):
                fmt = "png"
            source = service.source_factory()
            session = _Session(params=service.initial_params)
            sender = asyncio.create_task(service._send_loop(ws, source, session, fmt))
            try:
                while True:
                    raw = await ws.receive_text()
                    reply = service._handle(session, raw)
                    if reply is not None:
                        await ws.send_text(json.dumps(reply))
            except WebSocketDisconnect:
                pass
            finally:
                sender.cancel()
                try:
                    await sender
                except asyncio.CancelledError:
                    pass

        if self.static_dir and self.static_dir.is_dir():
            app.mount("/", StaticFiles(directory=self.static_dir, html=True),
                      name="console")
        return app


def serve(service: TuningService, host: str = "127.0.0.1", port: int = 8787) -> None:
    """Run the service under uvicorn; wraps bind errors as BindFailure."""
    import uvicorn

    try:
        uvicorn.run(service.build_app(), host=host, port=port, log_level="info")
    except OSError as exc:
        raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
