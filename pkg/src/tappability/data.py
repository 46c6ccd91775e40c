"""Corpus ingestion, rater-label aggregation, and dataset splitting.

The on-disk corpus layout is one PNG per screenshot at ``<root>/<screenshot_id>.png``
plus a JSON-Lines manifest with one row per labeled element::

    {"screenshot_id": ..., "element_id": ..., "bbox": [x_min, y_min, x_max, y_max],
     "view_type": ..., "is_leaf": ..., "declared_clickable": ..., "votes": [bool x 5]}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from PIL import Image

# Closed vocabulary of element types (24 Android view classes). Override by
# passing an explicit ``vocabulary`` to ingest_corpus.
DEFAULT_VIEW_TYPES = (
    "ImageView", "Button", "TextView", "EditText", "ImageButton",
    "CheckBox", "RadioButton", "Switch", "ToggleButton", "Spinner",
    "SeekBar", "ProgressBar", "ListView", "RecyclerView", "GridView",
    "ScrollView", "LinearLayout", "RelativeLayout", "FrameLayout",
    "CardView", "Toolbar", "TabItem", "FloatingActionButton", "WebView",
)

VOTES_REQUIRED = 5
MAX_ELEMENTS_PER_SCREEN = 5


class CorpusError(ValueError):
    """Raised for unrecoverable corpus-level problems (not per-row rejections)."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in native pixel coordinates, half-open on both axes."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate bbox {self.as_list()}")
        if self.x_min < 0 or self.y_min < 0:
            raise ValueError(f"bbox out of bounds {self.as_list()}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    def fits_in(self, w: int, h: int) -> bool:
        return self.x_max <= w and self.y_max <= h

    def as_list(self) -> list[int]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @classmethod
    def from_list(cls, coords) -> "BoundingBox":
        if len(coords) != 4:
            raise ValueError(f"bbox needs 4 coordinates, got {len(coords)}")
        return cls(*(int(c) for c in coords))


@dataclass
class Screenshot:
    """An RGB screenshot in its native resolution."""

    id: str
    pixels: np.ndarray  # uint8, shape (H, W, 3)
    source_app: str | None = None

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"screenshot must be HxWx3, got shape {px.shape}")
        self.pixels = px.astype(np.uint8, copy=False)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class ElementAnnotation:
    screenshot_id: str
    element_id: str
    bbox: BoundingBox
    view_type: str
    is_leaf: bool = True
    declared_clickable: bool = False

    @property
    def ref(self) -> tuple[str, str]:
        return (self.screenshot_id, self.element_id)


@dataclass(frozen=True)
class RaterLabelSet:
    """Ordered tappable/not-tappable votes for one element."""

    element_ref: tuple[str, str]
    votes: tuple[bool, ...]

    def __post_init__(self):
        if not 1 <= len(self.votes) <= VOTES_REQUIRED:
            raise ValueError(f"expected 1..{VOTES_REQUIRED} votes, got {len(self.votes)}")


@dataclass(frozen=True)
class LabeledElement:
    annotation: ElementAnnotation
    majority_tappable: bool
    agreement: int
    positive_fraction: float

    @property
    def ref(self) -> tuple[str, str]:
        return self.annotation.ref


@dataclass
class DatasetSplit:
    train: list[LabeledElement]
    validation: list[LabeledElement]
    test: list[LabeledElement]
    seed: int


@dataclass
class ScreenRecord:
    """One screenshot with its element annotations and rater votes."""

    screenshot: Screenshot
    annotations: list[ElementAnnotation]
    labels: list[RaterLabelSet]


@dataclass
class ElementNode:
    """Node of a view-hierarchy tree used for labeling-candidate selection."""

    annotation: ElementAnnotation
    children: list["ElementNode"] = field(default_factory=list)


def aggregate_labels(votes: RaterLabelSet) -> tuple[bool, int, float]:
    """Reduce a 5-vote set to (majority_tappable, agreement, positive_fraction).

    Majority is at 3-of-5; agreement is the size of the majority bloc.
    """
    if len(votes.votes) != VOTES_REQUIRED:
        raise ValueError(
            f"incomplete label set: expected {VOTES_REQUIRED} votes, got {len(votes.votes)}"
        )
    count_true = sum(votes.votes)
    count_false = VOTES_REQUIRED - count_true
    agreement = max(count_true, count_false)
    majority = count_true >= 3
    return majority, agreement, float(Fraction(count_true, VOTES_REQUIRED))


def label_element(annotation: ElementAnnotation, votes: RaterLabelSet) -> LabeledElement:
    majority, agreement, frac = aggregate_labels(votes)
    return LabeledElement(annotation, majority, agreement, frac)


def labeled_elements(records: list[ScreenRecord]) -> list[LabeledElement]:
    """Join annotations with complete vote sets across screen records."""
    out = []
    for rec in records:
        by_ref = {a.ref: a for a in rec.annotations}
        for votes in rec.labels:
            if len(votes.votes) != VOTES_REQUIRED:
                continue
            ann = by_ref.get(votes.element_ref)
            if ann is not None:
                out.append(label_element(ann, votes))
    return out


def agreement_histogram(elements: list[LabeledElement]) -> dict[int, int]:
    counts = {3: 0, 4: 0, 5: 0}
    for el in elements:
        counts[el.agreement] += 1
    return counts


def make_split(
    elements: list[LabeledElement], seed: int, by_screen: bool = False
) -> DatasetSplit:
    """Deterministic 80/10/10 split by element (or by screen with by_screen=True)."""
    if len(elements) < 10:
        raise ValueError(f"too small to split: {len(elements)} elements (need >= 10)")
    rng = random.Random(seed)
    if by_screen:
        groups: dict[str, list[LabeledElement]] = {}
        for el in elements:
            groups.setdefault(el.annotation.screenshot_id, []).append(el)
        keys = sorted(groups)
        rng.shuffle(keys)
        shuffled = [el for k in keys for el in groups[k]]
    else:
        shuffled = sorted(elements, key=lambda el: el.ref)
        rng.shuffle(shuffled)
    n = len(shuffled)
    n_train = round(0.8 * n)
    n_val = round(0.1 * n)
    return DatasetSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
        seed=seed,
    )


def _descendants(node: ElementNode):
    for child in node.children:
        yield child
        yield from _descendants(child)


def select_elements_for_labeling(
    roots: list[ElementNode], seed: int = 0, max_elements: int = MAX_ELEMENTS_PER_SCREEN
) -> list[ElementAnnotation]:
    """Pick up to 5 labeling candidates from a view hierarchy.

    Clickable candidates are top-level clickable nodes (no clickable ancestor),
    discovered leaf-first. Non-clickable nodes are eligible too, but once a
    non-clickable node is picked its descendants are excluded. Which candidates
    land in the final 5 is seeded uniform sampling.
    """
    clickable: list[ElementNode] = []
    nonclickable: list[ElementNode] = []

    def walk(node: ElementNode, has_clickable_ancestor: bool):
        is_clickable = node.annotation.declared_clickable
        for child in node.children:
            walk(child, has_clickable_ancestor or is_clickable)
        # post-order: leaves first
        if is_clickable and not has_clickable_ancestor:
            clickable.append(node)
        elif not is_clickable:
            nonclickable.append(node)

    for root in roots:
        walk(root, False)

    candidates = clickable + nonclickable
    rng = random.Random(seed)
    rng.shuffle(candidates)

    chosen: list[ElementNode] = []
    chosen_ids: set[str] = set()
    excluded: set[str] = set()
    for node in candidates:
        if len(chosen) >= max_elements:
            break
        if node.annotation.element_id in excluded:
            continue
        descendant_ids = {d.annotation.element_id for d in _descendants(node)}
        if not node.annotation.declared_clickable and descendant_ids & chosen_ids:
            continue  # would create a non-clickable ancestor of a chosen element
        chosen.append(node)
        chosen_ids.add(node.annotation.element_id)
        if not node.annotation.declared_clickable:
            excluded.update(descendant_ids)
    return [n.annotation for n in chosen]


# ---------------------------------------------------------------------------
# On-disk corpus IO


@dataclass(frozen=True)
class Rejection:
    line: int
    element_ref: tuple[str, str]
    reason: str


def _manifest_row(screenshot_id: str, ann: ElementAnnotation, votes: RaterLabelSet) -> dict:
    return {
        "screenshot_id": screenshot_id,
        "element_id": ann.element_id,
        "bbox": ann.bbox.as_list(),
        "view_type": ann.view_type,
        "is_leaf": ann.is_leaf,
        "declared_clickable": ann.declared_clickable,
        "votes": list(votes.votes),
    }


def write_corpus(records: list[ScreenRecord], root: str | Path, manifest_name: str = "manifest.jsonl") -> Path:
    """Write screenshots as PNGs plus a JSONL manifest under ``root``."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in records:
        Image.fromarray(rec.screenshot.pixels).save(root / f"{rec.screenshot.id}.png")
        votes_by_ref = {v.element_ref: v for v in rec.labels}
        for ann in rec.annotations:
            votes = votes_by_ref.get(ann.ref)
            if votes is None:
                continue
            lines.append(json.dumps(_manifest_row(rec.screenshot.id, ann, votes), sort_keys=True))
    manifest = root / manifest_name
    manifest.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return manifest


def ingest_corpus(
    root: str | Path,
    manifest: str | Path | None = None,
    vocabulary: tuple[str, ...] = DEFAULT_VIEW_TYPES,
) -> tuple[list[ScreenRecord], list[Rejection]]:
    """Load a corpus directory, validating every manifest row.

    Invalid rows are dropped and reported, never fatal. Returns the accepted
    screen records and the rejection report.
    """
    root = Path(root)
    manifest = Path(manifest) if manifest else root / "manifest.jsonl"
    if not manifest.is_file():
        raise CorpusError(f"manifest not found: {manifest}")
    vocab = set(vocabulary)

    screenshots: dict[str, Screenshot | None] = {}

    def load_screenshot(sid: str) -> Screenshot | None:
        if sid not in screenshots:
            path = root / f"{sid}.png"
            if not path.is_file():
                screenshots[sid] = None
            else:
                pixels = np.asarray(Image.open(path).convert("RGB"))
                screenshots[sid] = Screenshot(id=sid, pixels=pixels)
        return screenshots[sid]

    accepted: dict[str, ScreenRecord] = {}
    seen_refs: set[tuple[str, str]] = set()
    rejections: list[Rejection] = []

    with open(manifest, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            ref = ("?", "?")
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                rejections.append(Rejection(lineno, ref, "unparseable JSON"))
                continue
            try:
                sid = str(row["screenshot_id"])
                eid = str(row["element_id"])
                ref = (sid, eid)
                if ref in seen_refs:
                    raise ValueError("duplicate element id")
                shot = load_screenshot(sid)
                if shot is None:
                    raise ValueError("missing image file")
                bbox = BoundingBox.from_list(row["bbox"])
                if not bbox.fits_in(shot.width, shot.height):
                    raise ValueError("bbox out of bounds")
                view_type = str(row["view_type"])
                if view_type not in vocab:
                    raise ValueError(f"unknown view type {view_type!r}")
                votes = RaterLabelSet(ref, tuple(bool(v) for v in row["votes"]))
                ann = ElementAnnotation(
                    screenshot_id=sid,
                    element_id=eid,
                    bbox=bbox,
                    view_type=view_type,
                    is_leaf=bool(row.get("is_leaf", True)),
                    declared_clickable=bool(row.get("declared_clickable", False)),
                )
            except KeyError as exc:
                rejections.append(Rejection(lineno, ref, f"missing field {exc}"))
                continue
            except (ValueError, TypeError) as exc:
                rejections.append(Rejection(lineno, ref, str(exc)))
                continue
            seen_refs.add(ref)
            if sid not in accepted:
                accepted[sid] = ScreenRecord(screenshot=shot, annotations=[], labels=[])
            accepted[sid].annotations.append(ann)
            accepted[sid].labels.append(votes)

    return list(accepted.values()), rejections
