"""HTTP session layer for the interactive segmentation workflow.

A session holds one uploaded volume plus painted seed strokes; the client
runs the engine, refines the foreground mask with morphology, and reads
volumetry.  All state lives in memory (optionally journaled to a directory);
replaying an identical call sequence against a fresh service produces
byte-identical label downloads.

Slice rendering: display = floor(clamp((v - (level - window/2)) / window) * 255 + 0.5).
Label ids map to a fixed palette (0 transparent, 1 green, 2 yellow).
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image
from pydantic import BaseModel, Field

from . import morphology, volumetry
from .errors import InsufficientSeeds, NoSeeds, UnknownOperation, VoxsegError
from .growcut import GrowCutConfig, GrowCutEngine, SegmentationResult
from .grid import LabelVolume, ScalarVolume
from .nrrd_io import volume_from_nrrd_bytes, volume_to_nrrd_bytes

LABEL_PALETTE = [
    (0, 0, 0),        # 0: transparent
    (0, 255, 0),      # 1: foreground, green
    (255, 255, 0),    # 2: background, yellow
    (255, 0, 0),
    (0, 128, 255),
    (255, 0, 255),
    (0, 255, 255),
    (255, 128, 0),
]

_AXES = {"x": 2, "y": 1, "z": 0}  # array axis in (z, y, x) order


@dataclass
class Session:
    id: str
    volume: ScalarVolume
    seeds: LabelVolume
    result: SegmentationResult | None = None
    mask: np.ndarray | None = None  # current binary foreground, (nz, ny, nx) uint8
    label_view: np.ndarray | None = None  # what the label slice layer shows
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class Stroke(BaseModel):
    axis: Literal["x", "y", "z"]
    slice_index: int
    polyline: list[tuple[float, float]] = Field(min_length=1)
    brush_radius_mm: float = Field(ge=0)
    label: int = Field(ge=0, le=255)


class SegmentRequest(BaseModel):
    connectivity: int | None = None
    max_iters: int | None = None
    roi_margin_fraction: float | None = None
    use_roi: bool | None = None
    worker_count: int | None = None


class MorphRequest(BaseModel):
    ops: list[str] = Field(min_length=1)
    connectivity: int = 6


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


def _slice_plane(arr: np.ndarray, axis: str, index: int) -> np.ndarray:
    """2D plane: rows/cols are the remaining axes, slow axis first.

    axis z -> (y rows, x cols); axis y -> (z, x); axis x -> (z, y).
    """
    ax = _AXES[axis]
    if not 0 <= index < arr.shape[ax]:
        raise ApiError(400, f"slice index {index} outside axis {axis} of size {arr.shape[ax]}")
    return np.take(arr, index, axis=ax)


def window_display(values: np.ndarray, window: float, level: float) -> np.ndarray:
    """Linear window/level mapping to display bytes, rounding half up."""
    if window <= 0:
        raise ApiError(400, "window must be positive")
    d = (values.astype(np.float64) - (level - window / 2.0)) / window
    np.clip(d, 0.0, 1.0, out=d)
    return np.floor(d * 255.0 + 0.5).astype(np.uint8)


def _label_png(plane: np.ndarray) -> bytes:
    img = Image.fromarray(plane, mode="P")
    palette = []
    for i in range(256):
        palette.extend(LABEL_PALETTE[i % len(LABEL_PALETTE)] if i < len(LABEL_PALETTE) else (0, 0, 0))
    img.putpalette(palette)
    buf = io.BytesIO()
    img.save(buf, format="PNG", transparency=0)
    return buf.getvalue()


def _gray_png(plane: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(plane, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def _stroke_plane_geometry(vol: ScalarVolume, axis: str):
    """(u array axis, v array axis, u spacing, v spacing) for a stroke plane."""
    sx, sy, sz = vol.spacing
    if axis == "z":
        return 2, 1, sx, sy  # u=x, v=y
    if axis == "y":
        return 2, 0, sx, sz  # u=x, v=z
    return 1, 0, sy, sz      # u=y, v=z


def _segment_distances(pu, pv, a, b) -> np.ndarray:
    """Distance from grid points (pu, pv) to segment a-b, all in mm."""
    au, av = a
    bu, bv = b
    du, dv = bu - au, bv - av
    den = du * du + dv * dv
    if den == 0.0:
        return np.hypot(pu - au, pv - av)
    t = ((pu - au) * du + (pv - av) * dv) / den
    np.clip(t, 0.0, 1.0, out=t)
    return np.hypot(pu - (au + t * du), pv - (av + t * dv))


def rasterize_stroke(seeds: LabelVolume, volume: ScalarVolume, stroke: Stroke) -> int:
    """Paint the stroke label into the seed volume; returns voxels written.

    A voxel on the stroke's slice is painted iff its center lies within
    brush_radius_mm (in-plane physical distance) of the polyline.
    """
    ax = _AXES[stroke.axis]
    dims_zyx = seeds.labels.shape
    if not 0 <= stroke.slice_index < dims_zyx[ax]:
        raise ApiError(400, f"slice index {stroke.slice_index} outside axis {stroke.axis}")
    u_ax, v_ax, su, sv = _stroke_plane_geometry(volume, stroke.axis)
    n_u = dims_zyx[u_ax]
    n_v = dims_zyx[v_ax]
    pts = [(u * su, v * sv) for u, v in stroke.polyline]
    r = stroke.brush_radius_mm
    us = [p[0] for p in pts]
    vs = [p[1] for p in pts]
    u0 = max(0, int(np.floor((min(us) - r) / su)))
    u1 = min(n_u - 1, int(np.ceil((max(us) + r) / su)))
    v0 = max(0, int(np.floor((min(vs) - r) / sv)))
    v1 = min(n_v - 1, int(np.ceil((max(vs) + r) / sv)))
    if u0 > u1 or v0 > v1:
        return 0
    uu, vv = np.meshgrid(np.arange(u0, u1 + 1), np.arange(v0, v1 + 1), indexing="xy")
    pu = uu * su
    pv = vv * sv
    dist = np.full(pu.shape, np.inf)
    segs = list(zip(pts[:-1], pts[1:])) if len(pts) > 1 else [(pts[0], pts[0])]
    for a, b in segs:
        np.minimum(dist, _segment_distances(pu, pv, a, b), out=dist)
    hit = dist <= r

    plane_index = [slice(None)] * 3
    plane_index[ax] = stroke.slice_index
    plane = seeds.labels[tuple(plane_index)]
    # plane axes are the remaining array axes, slow-first; map (v, u) to them
    if v_ax < u_ax:
        target = plane[v0:v1 + 1, u0:u1 + 1]
        target[hit] = stroke.label
    else:
        target = plane[u0:u1 + 1, v0:v1 + 1]
        target[hit.T] = stroke.label
    return int(np.count_nonzero(hit))


class SessionStore:
    def __init__(self, data_dir: str | None = None):
        self.sessions: dict[str, Session] = {}
        self.data_dir = Path(data_dir) if data_dir else None
        self._lock = threading.Lock()

    def create(self, volume: ScalarVolume) -> Session:
        sid = uuid.uuid4().hex[:16]
        seeds = LabelVolume(
            labels=np.zeros(volume.data.shape, np.uint8),
            spacing=volume.spacing,
            origin=volume.origin,
        )
        session = Session(id=sid, volume=volume, seeds=seeds)
        with self._lock:
            self.sessions[sid] = session
        if self.data_dir:
            d = self.data_dir / sid
            d.mkdir(parents=True, exist_ok=True)
            (d / "volume.nrrd").write_bytes(volume_to_nrrd_bytes(volume))
        return session

    def get(self, sid: str) -> Session:
        session = self.sessions.get(sid)
        if session is None:
            raise ApiError(404, f"unknown session {sid}")
        return session

    def journal(self, session: Session, event: dict) -> None:
        if not self.data_dir:
            return
        path = self.data_dir / session.id / "journal.jsonl"
        with open(path, "a") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")


def create_app(data_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="voxseg service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Slice-Width", "X-Slice-Height", "X-Revision"],
    )
    store = SessionStore(data_dir)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        blob = await request.body()
        try:
            volume = volume_from_nrrd_bytes(blob, source="<upload>")
        except VoxsegError as exc:
            raise ApiError(400, f"{type(exc).__name__}: {exc}") from exc
        if isinstance(volume, LabelVolume):  # pragma: no cover - subset never returns this
            raise ApiError(400, "expected a scalar volume")
        session = store.create(volume)
        data = volume.data
        return {
            "session_id": session.id,
            "dims": list(volume.dims),
            "spacing": list(volume.spacing),
            "intensity_range": [float(data.min()), float(data.max())],
        }

    @app.get("/sessions/{sid}/slice")
    def get_slice(sid: str, axis: Literal["x", "y", "z"], index: int,
                  layer: Literal["image", "label"] = "image",
                  window: float | None = None, level: float | None = None,
                  format: Literal["png", "raw"] = "png"):
        session = store.get(sid)
        if layer == "image":
            plane = _slice_plane(session.volume.data, axis, index)
            if window is None or level is None:
                lo = float(session.volume.data.min())
                hi = float(session.volume.data.max())
                window = (hi - lo) or 1.0
                level = (hi + lo) / 2.0
            plane = window_display(plane, window, level)
            body = plane.tobytes() if format == "raw" else _gray_png(plane)
        else:
            labels = session.label_view if session.label_view is not None else session.seeds.labels
            plane = np.ascontiguousarray(_slice_plane(labels, axis, index))
            body = plane.tobytes() if format == "raw" else _label_png(plane)
        headers = {
            "X-Slice-Width": str(plane.shape[1]),
            "X-Slice-Height": str(plane.shape[0]),
            "X-Revision": str(session.revision),
        }
        media = "application/octet-stream" if format == "raw" else "image/png"
        return Response(content=body, media_type=media, headers=headers)

    @app.post("/sessions/{sid}/strokes")
    def post_strokes(sid: str, strokes: list[Stroke]):
        session = store.get(sid)
        dims_zyx = session.seeds.labels.shape
        for stroke in strokes:  # validate the whole batch before mutating
            if not 0 <= stroke.slice_index < dims_zyx[_AXES[stroke.axis]]:
                raise ApiError(400, f"slice index {stroke.slice_index} outside axis {stroke.axis}")
        with session.lock:
            for stroke in strokes:
                rasterize_stroke(session.seeds, session.volume, stroke)
            session.revision += 1
            count = int(np.count_nonzero(session.seeds.labels))
        store.journal(session, {"event": "strokes",
                                "strokes": [s.model_dump() for s in strokes]})
        return {"revision": session.revision, "labeled_voxel_count": count}

    @app.post("/sessions/{sid}/segment")
    def post_segment(sid: str, body: SegmentRequest | None = None):
        session = store.get(sid)
        overrides = {k: v for k, v in (body.model_dump() if body else {}).items() if v is not None}
        try:
            config = GrowCutConfig(**{**_default_config_dict(), **overrides})
        except ValueError as exc:
            raise ApiError(400, str(exc)) from exc
        with session.lock:
            try:
                engine = GrowCutEngine(session.volume, session.seeds, config)
            except (InsufficientSeeds, NoSeeds) as exc:
                raise ApiError(409, str(exc)) from exc
            result = engine.run()
            session.result = result
            session.mask = (result.labels.labels == 1).astype(np.uint8)
            session.label_view = result.labels.labels
            session.revision += 1
        store.journal(session, {"event": "segment", "config": overrides,
                                "iterations": result.iterations_run})
        return {
            "iterations": result.iterations_run,
            "converged": result.converged,
            "roi": {"lo": list(result.roi.lo), "hi": list(result.roi.hi)},
            "elapsed": result.elapsed,
        }

    @app.post("/sessions/{sid}/morph")
    def post_morph(sid: str, body: MorphRequest):
        session = store.get(sid)
        with session.lock:
            if session.mask is None:
                raise ApiError(409, "no segmentation result yet")
            mask_vol = LabelVolume(labels=session.mask, spacing=session.volume.spacing,
                                   origin=session.volume.origin)
            try:
                out = morphology.apply_pipeline(mask_vol, body.ops, body.connectivity)
            except (UnknownOperation, ValueError) as exc:
                raise ApiError(400, str(exc)) from exc
            except VoxsegError as exc:
                raise ApiError(409, str(exc)) from exc
            session.mask = out.labels
            session.label_view = out.labels
            session.revision += 1
            volume_mm3 = volumetry.mask_volume_mm3(out)
        store.journal(session, {"event": "morph", "ops": body.ops,
                                "connectivity": body.connectivity})
        return {"revision": session.revision, "volume_mm3": volume_mm3}

    @app.get("/sessions/{sid}/stats")
    def get_stats(sid: str, axis: Literal["x", "y", "z"] = "z"):
        session = store.get(sid)
        if session.mask is None or session.result is None:
            raise ApiError(409, "no segmentation result yet")
        mask_vol = LabelVolume(labels=session.mask, spacing=session.volume.spacing,
                               origin=session.volume.origin)
        return {
            "volume_mm3": volumetry.mask_volume_mm3(mask_vol),
            "slice_span": volumetry.slice_span(mask_vol, axis),
            "iterations": session.result.iterations_run,
            "elapsed": session.result.elapsed,
            "revision": session.revision,
        }

    @app.get("/sessions/{sid}/label")
    def get_label(sid: str):
        session = store.get(sid)
        if session.mask is None:
            raise ApiError(409, "no segmentation result yet")
        mask_vol = LabelVolume(labels=session.mask, spacing=session.volume.spacing,
                               origin=session.volume.origin)
        return Response(content=volume_to_nrrd_bytes(mask_vol),
                        media_type="application/octet-stream",
                        headers={"X-Revision": str(session.revision)})

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _default_config_dict() -> dict:
    return {
        "connectivity": 26,
        "max_iters": "auto",
        "roi_margin_fraction": 0.05,
        "use_roi": True,
        "worker_count": "auto",
    }
