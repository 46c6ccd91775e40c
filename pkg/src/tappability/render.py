"""Heatmap rendering: a diverging-colormap overlay and an attribution-filtered view.

Values are normalized per example only (min -> blue, max -> red through the
matplotlib "coolwarm" diverging map). A constant attribution renders as the
uniform mid-color.
"""

from __future__ import annotations

import numpy as np
from matplotlib import colormaps

from .regions import RegionAttribution

COLORMAP = "coolwarm"


def region_value_map(region_attr: RegionAttribution, shape: tuple[int, int]) -> np.ndarray:
    """Per-pixel density map; where regions overlap, the better-ranked one wins."""
    lo, _ = region_attr.value_range
    values = np.full(shape, lo, dtype=np.float64)
    for score in reversed(region_attr.ranked):  # paint worst-first so best overwrites
        for r, start, stop in score.region.runs:
            values[r, start:stop] = score.density
    return values


def normalize_per_example(values: np.ndarray, value_range: tuple[float, float]) -> np.ndarray:
    """Map to [0,1] with this example's min/max; constant input maps to 0.5."""
    lo, hi = value_range
    if hi - lo <= 0:
        return np.full(values.shape, 0.5, dtype=np.float64)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


def render_heatmap(
    region_attr: RegionAttribution, base_rgb: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(overlay, filtered) uint8 RGB images at the attribution resolution.

    ``base_rgb`` is the letterboxed screenshot the attribution was computed on,
    float in [0,1] or uint8, with the same HxW as the regions. The overlay is
    the pure colormap rendering (clients composite it with opacity); the
    filtered view multiplies screenshot luminance by normalized attribution,
    so the most influential pixels are the brightest.
    """
    base = np.asarray(base_rgb)
    if base.dtype == np.uint8:
        base = base.astype(np.float64) / 255.0
    shape = base.shape[:2]

    values = region_value_map(region_attr, shape)
    norm = normalize_per_example(values, region_attr.value_range)

    cmap = colormaps[COLORMAP]
    overlay = (cmap(norm)[:, :, :3] * 255).round().astype(np.uint8)

    luminance = base @ np.array([0.299, 0.587, 0.114])
    filtered = (np.repeat((luminance * norm)[:, :, None], 3, axis=2) * 255).round().astype(np.uint8)
    return overlay, filtered
