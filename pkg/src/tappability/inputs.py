"""Model-input construction: binary region masks and 4-channel encoded tensors.

Screenshots are resized aspect-preserving to fit the 960x540 (HxW) model
canvas, centered with zero padding (letterbox). The bounding box goes through
the same mapping and the mask is rasterized from the transformed corners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .data import BoundingBox, Screenshot

TARGET_H, TARGET_W = 960, 540


class EncodeError(ValueError):
    pass


def build_mask(bbox: BoundingBox, h: int, w: int) -> np.ndarray:
    """Indicator of the half-open rectangle: 1 where y_min<=i<y_max, x_min<=j<x_max."""
    if not bbox.fits_in(w, h):
        raise ValueError(f"bbox {bbox.as_list()} out of bounds for {h}x{w}")
    mask = np.zeros((h, w), dtype=np.float32)
    mask[bbox.y_min : bbox.y_max, bbox.x_min : bbox.x_max] = 1.0
    return mask


@dataclass(frozen=True)
class TransformRecord:
    """Resize mapping from native coordinates to the model canvas."""

    native_w: int
    native_h: int
    scale: float
    pad_x: int
    pad_y: int
    content_w: int
    content_h: int
    target_h: int = TARGET_H
    target_w: int = TARGET_W

    def apply_bbox(self, bbox: BoundingBox) -> BoundingBox:
        """Map a native-resolution bbox onto the model canvas (rounded corners)."""
        x0 = round(bbox.x_min * self.scale) + self.pad_x
        x1 = round(bbox.x_max * self.scale) + self.pad_x
        y0 = round(bbox.y_min * self.scale) + self.pad_y
        y1 = round(bbox.y_max * self.scale) + self.pad_y
        x0, x1 = max(0, min(x0, self.target_w)), max(0, min(x1, self.target_w))
        y0, y1 = max(0, min(y0, self.target_h)), max(0, min(y1, self.target_h))
        if x0 >= x1 or y0 >= y1:
            raise EncodeError(
                f"element vanishes at model resolution: bbox {bbox.as_list()}"
            )
        return BoundingBox(x0, y0, x1, y1)


@dataclass
class ModelInput:
    """HxWx4 float tensor in [0,1]: RGB channels plus a binary mask channel."""

    tensor: np.ndarray
    transform: TransformRecord

    @property
    def rgb(self) -> np.ndarray:
        return self.tensor[:, :, :3]

    @property
    def mask(self) -> np.ndarray:
        return self.tensor[:, :, 3]


def letterbox_transform(native_w: int, native_h: int, target_hw: tuple[int, int] = (TARGET_H, TARGET_W)) -> TransformRecord:
    th, tw = target_hw
    scale = min(tw / native_w, th / native_h)
    content_w = max(1, round(native_w * scale))
    content_h = max(1, round(native_h * scale))
    return TransformRecord(
        native_w=native_w,
        native_h=native_h,
        scale=scale,
        pad_x=(tw - content_w) // 2,
        pad_y=(th - content_h) // 2,
        content_w=content_w,
        content_h=content_h,
        target_h=th,
        target_w=tw,
    )


def resize_screenshot(screenshot: Screenshot, target_hw: tuple[int, int] = (TARGET_H, TARGET_W)) -> tuple[np.ndarray, TransformRecord]:
    """Letterboxed RGB canvas in [0,1] plus the transform used to place it."""
    rec = letterbox_transform(screenshot.width, screenshot.height, target_hw)
    img = Image.fromarray(screenshot.pixels)
    if (rec.content_w, rec.content_h) != (screenshot.width, screenshot.height):
        img = img.resize((rec.content_w, rec.content_h), Image.BILINEAR)
    canvas = np.zeros((rec.target_h, rec.target_w, 3), dtype=np.float32)
    canvas[rec.pad_y : rec.pad_y + rec.content_h, rec.pad_x : rec.pad_x + rec.content_w] = (
        np.asarray(img, dtype=np.float32) / 255.0
    )
    return canvas, rec


def encode_input(
    screenshot: Screenshot,
    bbox: BoundingBox,
    target_hw: tuple[int, int] = (TARGET_H, TARGET_W),
    rgb_cache: tuple[np.ndarray, TransformRecord] | None = None,
) -> ModelInput:
    """Build the 4-channel model input for one (screenshot, bbox) query.

    ``rgb_cache`` lets callers reuse the resized RGB canvas when encoding many
    elements of the same screen.
    """
    if not bbox.fits_in(screenshot.width, screenshot.height):
        raise EncodeError(
            f"bbox {bbox.as_list()} out of bounds for {screenshot.width}x{screenshot.height} screenshot"
        )
    if rgb_cache is None:
        canvas, rec = resize_screenshot(screenshot, target_hw)
    else:
        canvas, rec = rgb_cache
    model_bbox = rec.apply_bbox(bbox)
    mask = build_mask(model_bbox, rec.target_h, rec.target_w)
    tensor = np.concatenate([canvas, mask[:, :, None]], axis=2)
    return ModelInput(tensor=tensor, transform=rec)
