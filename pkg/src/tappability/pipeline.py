"""End-to-end predict -> attribute -> aggregate -> retrieve flow.

Shared by the CLI and the HTTP service so both produce identical artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attribution import dual_baseline_attribution
from .data import BoundingBox, ElementAnnotation, Screenshot
from .inputs import encode_input
from .net import PredictionResult, TapNet, model_fingerprint, predict_encoded
from .regions import (
    RegionAttribution,
    aggregate_regions,
    felzenszwalb_segments,
    regions_from_annotations,
)
from .render import render_heatmap
from .retrieval import EmbeddingIndex, NeighborResult, contrasting_neighbors

DEFAULT_STEPS = 128


@dataclass
class ExplainResult:
    prediction: PredictionResult
    region_attr: RegionAttribution
    overlay: np.ndarray       # uint8 RGB at model resolution
    filtered: np.ndarray      # uint8 RGB at model resolution
    neighbors: NeighborResult | None


def explain_query(
    model: TapNet,
    screenshot: Screenshot,
    bbox: BoundingBox,
    steps: int = DEFAULT_STEPS,
    region_mode: str = "felzenszwalb",
    annotations: list[ElementAnnotation] | None = None,
    index: EmbeddingIndex | None = None,
    k: int = 5,
    threshold: float = 0.5,
) -> ExplainResult:
    """Run the full explanation flow for one (screenshot, bbox) query."""
    encoded = encode_input(screenshot, bbox, target_hw=model.input_hw)
    prediction = predict_encoded(model, encoded, threshold)

    pixel_attr = dual_baseline_attribution(model, encoded, steps=steps)
    if region_mode == "ui_bbox":
        regions = regions_from_annotations(annotations or [], encoded.transform)
    else:
        regions = felzenszwalb_segments(encoded.rgb)
    region_attr = aggregate_regions(pixel_attr, regions)
    overlay, filtered = render_heatmap(region_attr, encoded.rgb)

    neighbors = None
    if index is not None:
        neighbors = contrasting_neighbors(
            index, prediction.embedding, k=k, fingerprint=model_fingerprint(model)
        )
    return ExplainResult(
        prediction=prediction,
        region_attr=region_attr,
        overlay=overlay,
        filtered=filtered,
        neighbors=neighbors,
    )
