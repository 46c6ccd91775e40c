"""Contrasting nearest-neighbor retrieval over model embeddings.

Corpus embeddings are split into predicted-tappable (> upper cut) and
predicted-non-tappable (< lower cut) lists; mid-band examples are dropped as
ambiguous. Search is exact L2 over each list, ties broken by element_ref, and
results stay bound to the model version through a weights fingerprint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import BoundingBox, LabeledElement, ScreenRecord, Screenshot
from .net import EMBEDDING_DIM, PredictionResult, TapNet, model_fingerprint
from .training import ElementBatcher
from .net import predict_encoded

DEFAULT_CUTS = (0.35, 0.65)
DEFAULT_K = 5


class IndexMismatchError(RuntimeError):
    """The index was built by a different model than the one issuing the query."""


@dataclass
class EmbeddingRecord:
    element_ref: tuple[str, str]
    vector: np.ndarray  # float32, shape (512,)
    tap_probability: float
    thumbnail_refs: dict[str, str] = field(default_factory=dict)


@dataclass
class EmbeddingIndex:
    tappable: list[EmbeddingRecord]
    non_tappable: list[EmbeddingRecord]
    cuts: tuple[float, float] = DEFAULT_CUTS
    checkpoint_fingerprint: str = ""


@dataclass
class NeighborResult:
    tappable_neighbors: list[tuple[EmbeddingRecord, float]]
    non_tappable_neighbors: list[tuple[EmbeddingRecord, float]]


def assign_side(tap_probability: float, cuts: tuple[float, float]) -> str | None:
    """Which index list a prediction lands in; None for the ambiguous mid-band."""
    lower, upper = cuts
    if tap_probability > upper:
        return "tappable"
    if tap_probability < lower:
        return "non_tappable"
    return None


def build_index(
    model: TapNet,
    records: list[ScreenRecord],
    cuts: tuple[float, float] = DEFAULT_CUTS,
) -> EmbeddingIndex:
    """Embed every annotated element once and split by predicted tappability."""
    lower, upper = cuts
    if lower > upper:
        raise ValueError(f"cuts must satisfy lower <= upper, got {cuts}")
    model.eval()
    screens = {rec.screenshot.id: rec.screenshot for rec in records}
    tappable, non_tappable = [], []
    batcher = ElementBatcher([], screens, model.input_hw)
    for rec in records:
        for ann in sorted(rec.annotations, key=lambda a: a.ref):
            result = predict_encoded(model, batcher.encode(_as_element(ann)))
            er = EmbeddingRecord(
                element_ref=ann.ref,
                vector=result.embedding.astype(np.float32),
                tap_probability=result.tap_probability,
                thumbnail_refs={
                    "screenshot": f"/api/corpus/thumbnail?id={ann.screenshot_id}",
                    "crop": f"/api/corpus/thumbnail?id={ann.screenshot_id}&element={ann.element_id}",
                },
            )
            side = assign_side(result.tap_probability, (lower, upper))
            if side == "tappable":
                tappable.append(er)
            elif side == "non_tappable":
                non_tappable.append(er)
    return EmbeddingIndex(
        tappable=tappable,
        non_tappable=non_tappable,
        cuts=(lower, upper),
        checkpoint_fingerprint=model_fingerprint(model),
    )


def _as_element(ann) -> LabeledElement:
    # ElementBatcher only reads .annotation; wrap with placeholder label fields
    return LabeledElement(annotation=ann, majority_tappable=False, agreement=5,
                          positive_fraction=0.0)


def _knearest(
    records: list[EmbeddingRecord], query: np.ndarray, k: int
) -> list[tuple[EmbeddingRecord, float]]:
    if not records:
        return []
    vectors = np.stack([r.vector for r in records]).astype(np.float64)
    q = np.asarray(query, dtype=np.float64)
    dists = np.sqrt(((vectors - q) ** 2).sum(axis=1))
    order = sorted(range(len(records)), key=lambda i: (dists[i], records[i].element_ref))
    out = []
    for i in order:
        if np.array_equal(records[i].vector, query.astype(np.float32)):
            continue  # the query's own record
        out.append((records[i], float(dists[i])))
        if len(out) == k:
            break
    return out


def contrasting_neighbors(
    index: EmbeddingIndex,
    query: np.ndarray,
    k: int = DEFAULT_K,
    fingerprint: str | None = None,
) -> NeighborResult:
    """Exact k-nearest from each side, each sorted ascending by L2 distance."""
    query = np.asarray(query)
    if query.shape != (EMBEDDING_DIM,):
        raise ValueError(f"query must be a {EMBEDDING_DIM}-vector, got shape {query.shape}")
    if fingerprint is not None and fingerprint != index.checkpoint_fingerprint:
        raise IndexMismatchError("index built by different model")
    return NeighborResult(
        tappable_neighbors=_knearest(index.tappable, query, k),
        non_tappable_neighbors=_knearest(index.non_tappable, query, k),
    )


def explain_with_examples(
    model: TapNet,
    index: EmbeddingIndex,
    screenshot: Screenshot,
    bbox: BoundingBox,
    k: int = DEFAULT_K,
) -> tuple[PredictionResult, NeighborResult]:
    """Predict one query and fetch its contrasting neighbors (split by prediction)."""
    from .net import predict

    result = predict(model, screenshot, bbox)
    neighbors = contrasting_neighbors(
        index, result.embedding, k=k, fingerprint=model_fingerprint(model)
    )
    return result, neighbors


# ---------------------------------------------------------------------------
# Persistence: raw little-endian float32 vector blocks + JSONL metadata sidecar


def save_index(index: EmbeddingIndex, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for side in ("tappable", "non_tappable"):
        records: list[EmbeddingRecord] = getattr(index, side)
        if records:
            block = np.stack([r.vector for r in records]).astype("<f4")
        else:
            block = np.empty((0, EMBEDDING_DIM), dtype="<f4")
        (out_dir / f"{side}.f32").write_bytes(block.tobytes())
        with open(out_dir / f"{side}.jsonl", "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps({
                    "element_ref": list(r.element_ref),
                    "tap_probability": r.tap_probability,
                    "thumbnail_refs": r.thumbnail_refs,
                }, sort_keys=True) + "\n")
    (out_dir / "meta.json").write_text(json.dumps({
        "cuts": list(index.cuts),
        "checkpoint_fingerprint": index.checkpoint_fingerprint,
        "dim": EMBEDDING_DIM,
        "counts": {"tappable": len(index.tappable), "non_tappable": len(index.non_tappable)},
    }, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_index(in_dir: str | Path) -> EmbeddingIndex:
    in_dir = Path(in_dir)
    meta = json.loads((in_dir / "meta.json").read_text(encoding="utf-8"))
    sides = {}
    for side in ("tappable", "non_tappable"):
        vectors = np.frombuffer((in_dir / f"{side}.f32").read_bytes(), dtype="<f4")
        vectors = vectors.reshape(-1, meta["dim"])
        records = []
        with open(in_dir / f"{side}.jsonl", encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                row = json.loads(line)
                records.append(EmbeddingRecord(
                    element_ref=tuple(row["element_ref"]),
                    vector=vectors[i].copy(),
                    tap_probability=row["tap_probability"],
                    thumbnail_refs=row.get("thumbnail_refs", {}),
                ))
        sides[side] = records
    return EmbeddingIndex(
        tappable=sides["tappable"],
        non_tappable=sides["non_tappable"],
        cuts=tuple(meta["cuts"]),
        checkpoint_fingerprint=meta["checkpoint_fingerprint"],
    )
