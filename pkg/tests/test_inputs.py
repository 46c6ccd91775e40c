from __future__ import annotations

import random

import numpy as np
import pytest

from tappability.data import BoundingBox, Screenshot
from tappability.inputs import (
    EncodeError,
    build_mask,
    encode_input,
    letterbox_transform,
)


def test_mask_full_frame_all_ones():
    mask = build_mask(BoundingBox(0, 0, 7, 5), h=5, w=7)
    assert mask.shape == (5, 7)
    assert (mask == 1).all()


def test_mask_half_open_rectangle():
    mask = build_mask(BoundingBox(2, 1, 4, 3), h=5, w=5)
    ones = {(r, c) for r, c in zip(*np.nonzero(mask))}
    assert ones == {(1, 2), (1, 3), (2, 2), (2, 3)}


def test_mask_popcount_equals_area_random():
    rng = random.Random(0)
    for _ in range(1000):
        h, w = rng.randint(2, 200), rng.randint(2, 200)
        x0 = rng.randint(0, w - 1)
        x1 = rng.randint(x0 + 1, w)
        y0 = rng.randint(0, h - 1)
        y1 = rng.randint(y0 + 1, h)
        bbox = BoundingBox(x0, y0, x1, y1)
        mask = build_mask(bbox, h, w)
        assert int(mask.sum()) == bbox.area == (x1 - x0) * (y1 - y0)


def test_mask_matches_inequality_oracle():
    rng = random.Random(1)
    for _ in range(20):
        h, w = rng.randint(2, 30), rng.randint(2, 30)
        x0, y0 = rng.randint(0, w - 1), rng.randint(0, h - 1)
        bbox = BoundingBox(x0, y0, rng.randint(x0 + 1, w), rng.randint(y0 + 1, h))
        mask = build_mask(bbox, h, w)
        for i in range(h):
            for j in range(w):
                inside = bbox.y_min <= i < bbox.y_max and bbox.x_min <= j < bbox.x_max
                assert mask[i, j] == (1.0 if inside else 0.0)


def test_mask_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        build_mask(BoundingBox(0, 0, 11, 5), h=5, w=10)


def _shot(w, h, seed=0):
    rng = np.random.default_rng(seed)
    return Screenshot("s", rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def test_encode_identity_at_native_resolution():
    shot = _shot(540, 960)
    enc = encode_input(shot, BoundingBox(10, 20, 110, 220))
    rec = enc.transform
    assert (rec.scale, rec.pad_x, rec.pad_y) == (1.0, 0, 0)
    assert enc.tensor.shape == (960, 540, 4)
    assert enc.tensor[:, :, :3].max() <= 1.0
    assert int(enc.mask.sum()) == 100 * 200
    assert np.allclose(enc.rgb, shot.pixels.astype(np.float32) / 255.0)


def test_encode_full_screen_mask_survives_downscale():
    shot = _shot(1080, 1920)
    enc = encode_input(shot, BoundingBox(0, 0, 1080, 1920))
    assert enc.transform.scale == 0.5
    assert (enc.mask == 1).all()


def test_encode_letterboxes_taller_aspect():
    shot = _shot(1080, 2280)
    enc = encode_input(shot, BoundingBox(0, 0, 1080, 2280))
    rec = enc.transform
    # expected geometry from the aspect-fit policy
    scale = min(540 / 1080, 960 / 2280)
    content_w = round(1080 * scale)
    pad_x = (540 - content_w) // 2
    assert rec.scale == pytest.approx(scale)
    assert rec.content_w == content_w and rec.pad_x == pad_x
    assert rec.content_h == 960 and rec.pad_y == 0
    # mask ones only inside the content area
    assert (enc.mask[:, :pad_x] == 0).all()
    assert (enc.mask[:, pad_x + content_w :] == 0).all()
    assert (enc.mask[:, pad_x : pad_x + content_w] == 1).all()
    # padding is zero in RGB too
    assert (enc.rgb[:, :pad_x] == 0).all()


def test_encode_wider_aspect_pads_vertically():
    shot = _shot(1000, 1000)
    enc = encode_input(shot, BoundingBox(0, 0, 1000, 1000))
    rec = enc.transform
    assert rec.content_w == 540 and rec.content_h == 540
    assert rec.pad_y == (960 - 540) // 2


def test_encode_mask_channel_binary(synth_records):
    rec = synth_records[0]
    enc = encode_input(rec.screenshot, rec.annotations[0].bbox, target_hw=(96, 54))
    assert set(np.unique(enc.mask)) <= {0.0, 1.0}
    assert enc.mask.sum() > 0


def test_encode_vanishing_element_errors():
    shot = _shot(4096, 4096)
    with pytest.raises(EncodeError, match="vanishes"):
        encode_input(shot, BoundingBox(0, 0, 2, 2))


def test_encode_bbox_out_of_bounds_errors():
    shot = _shot(100, 100)
    with pytest.raises(EncodeError):
        encode_input(shot, BoundingBox(0, 0, 101, 50))


def test_letterbox_transform_roundtrip_consistency():
    rec = letterbox_transform(1080, 1920, (960, 540))
    bb = rec.apply_bbox(BoundingBox(100, 200, 300, 400))
    assert bb.as_list() == [50, 100, 150, 200]
