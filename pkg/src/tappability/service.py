"""HTTP service wiring the model, attribution, and retrieval into one API.

Endpoints:
  POST /api/predict            -> {tap_probability, decision}
  POST /api/explain            -> prediction + heatmaps + ranked regions + neighbors
  GET  /api/corpus/thumbnail   -> PNG of a corpus screenshot or element crop

One checkpoint is pinned at startup; all 4xx bodies carry {code, message, field}.
"""

from __future__ import annotations

import base64
import io
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from PIL import Image
from pydantic import BaseModel

from .data import BoundingBox, ElementAnnotation, ScreenRecord, Screenshot
from .inputs import EncodeError
from .net import TapNet, model_fingerprint
from .pipeline import DEFAULT_STEPS, explain_query
from .retrieval import DEFAULT_K, EmbeddingIndex, IndexMismatchError

MAX_IMAGE_BYTES = 10 * 1024 * 1024
MAX_IMAGE_SIDE = 4096
MAX_STEPS = 1024


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field_name: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.field = field_name
        super().__init__(message)


class ExplainOptions(BaseModel):
    steps: int = DEFAULT_STEPS
    k: int = DEFAULT_K
    region_mode: str = "felzenszwalb"
    regions: list[dict] | None = None


class PredictRequest(BaseModel):
    image: str  # base64 PNG
    bbox: list[int]


class ExplainRequest(PredictRequest):
    options: ExplainOptions = ExplainOptions()


@dataclass
class ServiceState:
    model: TapNet
    index: EmbeddingIndex | None = None
    corpus: dict[str, ScreenRecord] = field(default_factory=dict)
    threshold: float = 0.5


def _decode_request(body: PredictRequest) -> tuple[Screenshot, BoundingBox]:
    try:
        raw = base64.b64decode(body.image, validate=True)
    except Exception:
        raise ApiError(400, "bad_image", "image is not valid base64", "image")
    if len(raw) > MAX_IMAGE_BYTES:
        raise ApiError(413, "image_too_large", f"image exceeds {MAX_IMAGE_BYTES} bytes", "image")
    try:
        img = Image.open(io.BytesIO(raw)).convert("RGB")
    except Exception:
        raise ApiError(400, "bad_image", "image bytes are not a decodable image", "image")
    if img.width > MAX_IMAGE_SIDE or img.height > MAX_IMAGE_SIDE:
        raise ApiError(413, "image_too_large",
                       f"image exceeds {MAX_IMAGE_SIDE}x{MAX_IMAGE_SIDE}", "image")
    screenshot = Screenshot(id="request", pixels=np.asarray(img))
    try:
        bbox = BoundingBox.from_list(body.bbox)
    except ValueError as exc:
        raise ApiError(400, "degenerate bbox", str(exc), "bbox")
    if not bbox.fits_in(screenshot.width, screenshot.height):
        raise ApiError(400, "bbox_out_of_bounds", "bbox exceeds image bounds", "bbox")
    return screenshot, bbox


def _png_b64(arr: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _neighbor_payload(neighbors) -> list[dict]:
    return [
        {
            "element_ref": list(rec.element_ref),
            "tap_probability": rec.tap_probability,
            "distance": dist,
            "thumbnail_refs": rec.thumbnail_refs,
        }
        for rec, dist in neighbors
    ]


def create_app(
    model: TapNet,
    index: EmbeddingIndex | None = None,
    corpus: list[ScreenRecord] | None = None,
    threshold: float = 0.5,
) -> FastAPI:
    state = ServiceState(
        model=model,
        index=index,
        corpus={rec.screenshot.id: rec for rec in (corpus or [])},
        threshold=threshold,
    )
    app = FastAPI(title="tappability service")
    app.state.service = state

    @app.exception_handler(ApiError)
    async def handle_api_error(_: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "field": exc.field},
        )

    @app.post("/api/predict")
    def api_predict(body: PredictRequest):
        if state.model is None:
            raise ApiError(503, "model_not_loaded", "no checkpoint loaded")
        screenshot, bbox = _decode_request(body)
        from .net import predict

        try:
            result = predict(state.model, screenshot, bbox, state.threshold)
        except EncodeError as exc:
            raise ApiError(400, "degenerate bbox", str(exc), "bbox")
        return {"tap_probability": result.tap_probability, "decision": result.decision}

    @app.post("/api/explain")
    def api_explain(body: ExplainRequest):
        if state.model is None:
            raise ApiError(503, "model_not_loaded", "no checkpoint loaded")
        opts = body.options
        if not 1 <= opts.steps <= MAX_STEPS:
            raise ApiError(400, "bad_option", f"steps must be in 1..{MAX_STEPS}", "options.steps")
        if not 1 <= opts.k <= 50:
            raise ApiError(400, "bad_option", "k must be in 1..50", "options.k")
        if opts.region_mode not in ("ui_bbox", "felzenszwalb"):
            raise ApiError(400, "bad_option", "region_mode must be ui_bbox or felzenszwalb",
                           "options.region_mode")
        screenshot, bbox = _decode_request(body)
        annotations = None
        if opts.regions:
            try:
                annotations = [
                    ElementAnnotation(
                        screenshot_id="request",
                        element_id=str(row.get("element_id", i)),
                        bbox=BoundingBox.from_list(row["bbox"]),
                        view_type=str(row.get("view_type", "TextView")),
                    )
                    for i, row in enumerate(opts.regions)
                ]
            except (KeyError, ValueError) as exc:
                raise ApiError(400, "bad_regions", str(exc), "options.regions")
        try:
            result = explain_query(
                state.model,
                screenshot,
                bbox,
                steps=opts.steps,
                region_mode=opts.region_mode,
                annotations=annotations,
                index=state.index,
                k=opts.k,
                threshold=state.threshold,
            )
        except EncodeError as exc:
            raise ApiError(400, "degenerate bbox", str(exc), "bbox")
        except IndexMismatchError as exc:
            raise ApiError(409, "index_mismatch", str(exc))
        except ValueError as exc:
            raise ApiError(400, "bad_regions", str(exc), "options.regions")

        ranked = [
            {
                "bbox": s.region.bbox.as_list(),
                "rectangular": s.region.is_rectangular,
                "total": s.total,
                "density": s.density,
                "rank": s.rank,
            }
            for s in result.region_attr.ranked
        ]
        payload = {
            "tap_probability": result.prediction.tap_probability,
            "decision": result.prediction.decision,
            "heatmap_overlay_png": _png_b64(result.overlay),
            "filtered_png": _png_b64(result.filtered),
            "ranked_regions": ranked,
            "neighbors_available": result.neighbors is not None,
            "neighbors": {
                "tappable": _neighbor_payload(result.neighbors.tappable_neighbors),
                "non_tappable": _neighbor_payload(result.neighbors.non_tappable_neighbors),
            } if result.neighbors is not None else None,
        }
        return payload

    @app.get("/api/corpus/thumbnail")
    def api_thumbnail(id: str, element: str | None = None):
        rec = state.corpus.get(id)
        if rec is None:
            raise ApiError(404, "unknown_id", f"unknown screenshot id {id!r}", "id")
        pixels = rec.screenshot.pixels
        if element is not None:
            ann = next((a for a in rec.annotations if a.element_id == element), None)
            if ann is None:
                raise ApiError(404, "unknown_id", f"unknown element id {element!r}", "element")
            bb = ann.bbox
            pixels = pixels[bb.y_min : bb.y_max, bb.x_min : bb.x_max]
        buf = io.BytesIO()
        Image.fromarray(pixels).save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png",
                        headers={"Cache-Control": "public, max-age=86400, immutable"})

    @app.get("/api/health")
    def api_health():
        return {
            "model_loaded": state.model is not None,
            "index_loaded": state.index is not None,
            "fingerprint": model_fingerprint(state.model) if state.model else None,
        }

    return app
