"""HTTP inference service: the backend for the drawing front-end.

Endpoints: POST /api/infer (layout JSON or PNG body -> translated PNG),
GET /api/random (stored example layout + its generation), GET /healthz.
Errors use the JSON envelope {"error": str, "path": str?}.
"""

from __future__ import annotations

import base64
import hashlib
import json
import random
import threading
from dataclasses import dataclass
from pathlib import Path

import anyio.to_thread
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.middleware.cors import CORSMiddleware

from .gan import load_checkpoint
from .raster import RasterImage, load_png, rasterize
from .shapes import LayoutError, parse_layout
from .train import translate

DEFAULT_MAX_BODY = 4 * 1024 * 1024


@dataclass(frozen=True)
class ServiceConfig:
    checkpoint_path: str | None = None
    max_body_bytes: int = DEFAULT_MAX_BODY
    seed_policy: str = "fixed"  # "fixed" | "per-request"
    fixed_seed: int = 0
    collection_dir: str | None = None  # corpus dir with layouts/*.json
    random_seed: int = 0
    # translate() reseeds the shared generator's dropout state, so forwards on
    # one model instance must not interleave; excess requests queue FIFO
    max_concurrency: int = 1
    static_dir: str | None = None

    def __post_init__(self):
        if self.seed_policy not in ("fixed", "per-request"):
            raise ValueError(f"seed_policy must be 'fixed' or 'per-request', got {self.seed_policy}")


def _error(status: int, message: str, path: str | None = None) -> JSONResponse:
    body = {"error": message}
    if path:
        body["path"] = path
    return JSONResponse(body, status_code=status)


def parameter_checksum(model) -> str:
    """Digest of all parameter bytes; used to assert read-only model memory."""
    h = hashlib.sha256()
    for name, p in sorted(model.state_dict().items()):
        h.update(name.encode())
        h.update(p.detach().cpu().numpy().tobytes())
    return h.hexdigest()


def _load_collection(collection_dir):
    items = []
    if collection_dir is None:
        return items
    layouts = sorted(Path(collection_dir).glob("layouts/*.json"))
    for p in layouts:
        items.append({"id": p.stem, "text": p.read_text()})
    return items


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    """Build the app; raises if a configured checkpoint fails to load."""
    app = FastAPI()
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    state = app.state
    state.config = config
    state.generator = None
    state.collection = _load_collection(config.collection_dir)
    state.rng = random.Random(config.random_seed)
    state.gate = threading.Semaphore(config.max_concurrency)
    if config.checkpoint_path is not None:
        gen, _, _ = load_checkpoint(config.checkpoint_path)
        gen.eval()
        state.generator = gen

    def run_inference(source: RasterImage, seed: int) -> bytes:
        with state.gate:
            out = translate(state.generator, source, dropout_seed=seed)
        return out.to_png_bytes()

    def pick_seed(request: Request) -> int:
        if config.seed_policy == "per-request":
            q = request.query_params.get("seed")
            if q is not None:
                return int(q)
            return state.rng.randrange(2**31)
        q = request.query_params.get("seed")
        return int(q) if q is not None else config.fixed_seed

    @app.get("/healthz")
    def healthz():
        if state.generator is None:
            return _error(503, "model not loaded")
        return Response(content="ok", media_type="text/plain")

    @app.post("/api/infer")
    async def infer(request: Request):
        length = request.headers.get("content-length")
        if length is not None and int(length) > config.max_body_bytes:
            return _error(413, f"request body exceeds {config.max_body_bytes} bytes")
        body = await request.body()
        if len(body) > config.max_body_bytes:
            return _error(413, f"request body exceeds {config.max_body_bytes} bytes")
        if state.generator is None:
            return _error(503, "model not loaded")
        content_type = (request.headers.get("content-type") or "").split(";")[0].strip()
        size = state.generator.cfg.image_size
        if content_type == "image/png":
            try:
                source = load_png(bytes(body))
            except Exception:
                return _error(400, "body is not a decodable PNG image")
        else:
            try:
                layout = parse_layout(body.decode("utf-8", errors="strict"))
            except UnicodeDecodeError:
                return _error(400, "body is neither valid UTF-8 JSON nor a PNG image")
            except LayoutError as e:
                return _error(400, str(e), path=e.path or None)
            source = rasterize(layout, size, size)
        try:
            seed = pick_seed(request)
        except ValueError:
            return _error(400, "seed must be an integer", path="seed")
        png = await anyio.to_thread.run_sync(run_inference, source, seed)
        return Response(content=png, media_type="image/png")

    @app.get("/api/random")
    async def random_sample(request: Request):
        if state.generator is None:
            return _error(503, "model not loaded")
        if not state.collection:
            return _error(404, "sample collection is empty")
        q = request.query_params.get("seed")
        if q is not None:
            idx = random.Random(int(q)).randrange(len(state.collection))
        else:
            idx = state.rng.randrange(len(state.collection))
        item = state.collection[idx]
        layout = parse_layout(item["text"])
        size = state.generator.cfg.image_size
        source = rasterize(layout, size, size)
        png = await anyio.to_thread.run_sync(run_inference, source, config.fixed_seed)
        return JSONResponse(
            {
                "id": item["id"],
                "layout": json.loads(item["text"]),
                "image_png_base64": base64.b64encode(png).decode("ascii"),
            }
        )

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
