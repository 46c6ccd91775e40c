"""Desk-scale synthetic UI corpus with known tappability ground truth.

Rendered screens follow a fixed generative rule: filled rounded rectangles
with centered text are tappable (buttons); flat text lines and decorative
image blocks are not. Every element gets a perfect 5/5 synthetic vote set
matching that rule, so learnability can be measured against known truth.
"""

from __future__ import annotations

import random

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .data import (
    BoundingBox,
    ElementAnnotation,
    RaterLabelSet,
    ScreenRecord,
    Screenshot,
)

SCREEN_W, SCREEN_H = 270, 480

_BACKGROUNDS = [(245, 245, 245), (255, 255, 255), (236, 239, 244), (250, 247, 240)]
_ACCENTS = [(33, 118, 255), (0, 150, 136), (233, 30, 99), (255, 87, 34), (63, 81, 181)]
_TEXTS = ["Sign in", "Submit", "Next", "Cancel", "Learn more", "Continue", "OK",
          "Settings", "Share", "Done"]
_LINES = ["Lorem ipsum dolor", "Terms of service", "Updated today",
          "Your recent items", "Version 2.4.1", "No new messages"]


def _font() -> ImageFont.ImageFont:
    return ImageFont.load_default()


def _draw_button(draw: ImageDraw.ImageDraw, rng: random.Random, x0, y0, x1, y1):
    color = rng.choice(_ACCENTS)
    draw.rounded_rectangle([x0, y0, x1, y1], radius=6, fill=color)
    text = rng.choice(_TEXTS)
    tw = draw.textlength(text, font=_font())
    draw.text(((x0 + x1 - tw) / 2, (y0 + y1) / 2 - 5), text, fill=(255, 255, 255), font=_font())


def _draw_text(draw: ImageDraw.ImageDraw, rng: random.Random, x0, y0, x1, y1):
    shade = rng.randint(40, 110)
    n_lines = max(1, (y1 - y0) // 14)
    for k in range(n_lines):
        draw.text((x0 + 2, y0 + 2 + 14 * k), rng.choice(_LINES), fill=(shade,) * 3, font=_font())


def _draw_image(draw: ImageDraw.ImageDraw, rng: random.Random, x0, y0, x1, y1):
    base = tuple(rng.randint(150, 220) for _ in range(3))
    draw.rectangle([x0, y0, x1, y1], fill=base)
    for _ in range(rng.randint(3, 6)):
        cx = rng.randint(x0, max(x0, x1 - 8))
        cy = rng.randint(y0, max(y0, y1 - 8))
        r = rng.randint(4, 14)
        color = tuple(rng.randint(90, 200) for _ in range(3))
        draw.ellipse([cx, cy, min(x1, cx + r), min(y1, cy + r)], fill=color)


# (kind, view_type, tappable, drawer)
_KINDS = {
    "button": ("Button", True, _draw_button),
    "text": ("TextView", False, _draw_text),
    "image": ("ImageView", False, _draw_image),
}


def _pick_kind(rng: random.Random) -> str:
    r = rng.random()
    if r < 0.5:
        return "button"
    if r < 0.78:
        return "text"
    return "image"


def _render_screen(sid: str, rng: random.Random) -> ScreenRecord:
    img = Image.new("RGB", (SCREEN_W, SCREEN_H), rng.choice(_BACKGROUNDS))
    draw = ImageDraw.Draw(img)

    n_elements = rng.randint(3, 6)
    kinds = [_pick_kind(rng) for _ in range(n_elements)]
    # guarantee at least one tappable and one non-tappable element per screen
    if all(k == "button" for k in kinds):
        kinds[rng.randrange(n_elements)] = rng.choice(["text", "image"])
    if not any(k == "button" for k in kinds):
        kinds[rng.randrange(n_elements)] = "button"
    rng.shuffle(kinds)

    annotations, labels = [], []
    y = rng.randint(10, 30)
    for idx, kind in enumerate(kinds):
        view_type, tappable, drawer = _KINDS[kind]
        h = rng.randint(28, 44) if kind == "button" else rng.randint(24, 64)
        w = rng.randint(120, 230)
        x0 = rng.randint(8, SCREEN_W - w - 8)
        y0 = min(y, SCREEN_H - h - 4)
        x1, y1 = x0 + w, y0 + h
        drawer(draw, rng, x0, y0, x1, y1)
        bbox = BoundingBox(x0, y0, x1, y1)
        ann = ElementAnnotation(
            screenshot_id=sid,
            element_id=f"e{idx}",
            bbox=bbox,
            view_type=view_type,
            is_leaf=True,
            declared_clickable=tappable,
        )
        annotations.append(ann)
        labels.append(RaterLabelSet(ann.ref, (tappable,) * 5))
        y = y1 + rng.randint(8, 28)
        if y > SCREEN_H - 40:
            y = rng.randint(10, 30)

    shot = Screenshot(id=sid, pixels=np.asarray(img), source_app="synthetic")
    return ScreenRecord(screenshot=shot, annotations=annotations, labels=labels)


def generate_synthetic_elements(n_elements: int, seed: int) -> tuple[list[ScreenRecord], int]:
    """Enough screens to cover ``n_elements``; returns (records, element count kept).

    The last screen's surplus elements are trimmed so exactly ``n_elements``
    annotations (and their vote sets) remain.
    """
    records: list[ScreenRecord] = []
    total = 0
    # average ~4.5 elements per screen; generate in one deterministic pass
    est_screens = max(1, int(n_elements / 3) + 2)
    for rec in generate_synthetic_corpus(est_screens, seed):
        if total >= n_elements:
            break
        keep = min(len(rec.annotations), n_elements - total)
        rec.annotations = rec.annotations[:keep]
        rec.labels = rec.labels[:keep]
        records.append(rec)
        total += keep
    return records, total


def generate_synthetic_corpus(n_screens: int, seed: int) -> list[ScreenRecord]:
    """Render ``n_screens`` deterministic synthetic screens with 5/5 vote sets."""
    n_screens = max(1, int(n_screens))
    master = random.Random(seed)
    records = []
    for i in range(n_screens):
        screen_rng = random.Random(master.getrandbits(64))
        records.append(_render_screen(f"synth-{seed}-{i:05d}", screen_rng))
    return records
