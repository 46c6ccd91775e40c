"""Region-level saliency: segment sources, per-region aggregation, merging.

Regions come either from native UI bounding boxes (the preferred source,
since they line up with actual widgets) or from multi-scale Felzenszwalb
oversegmentation as a fallback. Pixel attributions are summed per region,
ranked by density (mean attribution), and merged up to an area threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from skimage.segmentation import felzenszwalb

from .data import BoundingBox, ElementAnnotation
from .attribution import PixelAttribution
from .inputs import TransformRecord, EncodeError

logger = logging.getLogger(__name__)

DEFAULT_SCALES = (50.0, 100.0, 150.0, 250.0, 500.0, 1200.0)
DEFAULT_SIGMA = 0.8
DEFAULT_MIN_SIZE = 20


@dataclass(frozen=True)
class Region:
    """A pixel set stored as run-length rows: (row, col_start, col_stop) half-open."""

    runs: tuple[tuple[int, int, int], ...]
    source: str  # "ui_bbox" | "felzenszwalb"

    def __post_init__(self):
        if not self.runs:
            raise ValueError("region must be non-empty")

    @property
    def area(self) -> int:
        return sum(stop - start for _, start, stop in self.runs)

    @property
    def bbox(self) -> BoundingBox:
        """Tight bounding box of the pixel set."""
        rows = [r for r, _, _ in self.runs]
        return BoundingBox(
            min(start for _, start, _ in self.runs),
            min(rows),
            max(stop for _, _, stop in self.runs),
            max(rows) + 1,
        )

    @property
    def is_rectangular(self) -> bool:
        bb = self.bbox
        return self.area == bb.area

    @classmethod
    def from_bbox(cls, bbox: BoundingBox, source: str = "ui_bbox") -> "Region":
        return cls(
            runs=tuple((r, bbox.x_min, bbox.x_max) for r in range(bbox.y_min, bbox.y_max)),
            source=source,
        )

    @classmethod
    def from_mask(cls, mask: np.ndarray, source: str = "felzenszwalb") -> "Region":
        runs = []
        for r in np.flatnonzero(mask.any(axis=1)):
            row = mask[r]
            changes = np.flatnonzero(np.diff(np.r_[0, row.view(np.uint8), 0]))
            for start, stop in zip(changes[::2], changes[1::2]):
                runs.append((int(r), int(start), int(stop)))
        return cls(runs=tuple(runs), source=source)

    def to_mask(self, shape: tuple[int, int]) -> np.ndarray:
        mask = np.zeros(shape, dtype=bool)
        for r, start, stop in self.runs:
            mask[r, start:stop] = True
        return mask

    def sum_over(self, values: np.ndarray) -> float:
        return float(sum(values[r, start:stop].sum() for r, start, stop in self.runs))


@dataclass
class RegionScore:
    region: Region
    total: float
    density: float
    rank: int


@dataclass
class RegionAttribution:
    """Regions ranked most-to-least important, with the min/max used for rendering.

    Normalization is strictly per example; raw attribution magnitudes are not
    comparable across examples.
    """

    ranked: list[RegionScore]
    value_range: tuple[float, float]  # (min density, max density) of this example


def felzenszwalb_segments(
    image: np.ndarray,
    scales=DEFAULT_SCALES,
    sigma: float = DEFAULT_SIGMA,
    min_size: int = DEFAULT_MIN_SIZE,
) -> list[Region]:
    """Multi-scale graph-based oversegmentation; each scale yields a partition.

    The union over scales gives overlapping candidate regions.
    """
    image = np.asarray(image)
    if image.size == 0:
        raise ValueError("empty image")
    scales = [max(float(s), 1.0) for s in (scales or DEFAULT_SCALES)]
    regions: list[Region] = []
    for scale in scales:
        labels = felzenszwalb(image, scale=scale, sigma=max(sigma, 0.0),
                              min_size=max(int(min_size), 1))
        for lab in np.unique(labels):
            regions.append(Region.from_mask(labels == lab, source="felzenszwalb"))
    return regions


def regions_from_annotations(
    annotations: list[ElementAnnotation], transform: TransformRecord
) -> list[Region]:
    """One axis-aligned region per UI element, mapped to model resolution."""
    if not annotations:
        raise ValueError(
            "no annotations given; use felzenszwalb_segments as the fallback region source"
        )
    regions = []
    for ann in annotations:
        try:
            regions.append(Region.from_bbox(transform.apply_bbox(ann.bbox), source="ui_bbox"))
        except (EncodeError, ValueError) as exc:
            logger.warning("dropping annotation %s: %s", ann.ref, exc)
    return regions


def aggregate_regions(
    pixel_attr: PixelAttribution, regions: list[Region]
) -> RegionAttribution:
    """Sum pixel attributions per region; rank by density, then total, then input order."""
    if not regions:
        raise ValueError("empty region list")
    scored = []
    for i, region in enumerate(regions):
        total = region.sum_over(pixel_attr.values)
        scored.append((region, total, total / region.area, i))
    scored.sort(key=lambda t: (-t[2], -t[1], t[3]))
    ranked = [
        RegionScore(region=r, total=t, density=d, rank=rank)
        for rank, (r, t, d, _) in enumerate(scored)
    ]
    densities = [s.density for s in ranked]
    return RegionAttribution(ranked=ranked, value_range=(min(densities), max(densities)))


def merge_to_threshold(ranked: RegionAttribution, area_fraction: float,
                       shape: tuple[int, int]) -> Region:
    """Union of top-ranked regions, stopping once coverage exceeds ``area_fraction``.

    The region that crosses the threshold is included; overlap counts once.
    """
    if not 0.0 < area_fraction <= 1.0:
        raise ValueError(f"area_fraction must be in (0, 1], got {area_fraction}")
    total_pixels = shape[0] * shape[1]
    covered = np.zeros(shape, dtype=bool)
    for score in ranked.ranked:
        covered |= score.region.to_mask(shape)
        if covered.sum() / total_pixels > area_fraction:
            break
    return Region.from_mask(covered, source="merged")
