from __future__ import annotations

import json
import time
from dataclasses import asdict
from pathlib import Path

import pytest

import tappability as T
from tappability.synthetic import generate_synthetic_elements
from tappability.training import DESK_PRESET, TrainConfig, evaluate, screens_by_id, train

CACHE_DIR = Path(__file__).resolve().parent.parent / ".cache" / "desk"
DESK_SEED = 11
DESK_N_ELEMENTS = 2000


@pytest.fixture(scope="session")
def synth_records():
    return T.generate_synthetic_corpus(6, seed=7)


@pytest.fixture(scope="session")
def synth_screens(synth_records):
    return {rec.screenshot.id: rec.screenshot for rec in synth_records}


@pytest.fixture(scope="session")
def tiny_model():
    return T.build_classifier(seed=0, input_hw=(64, 36))


@pytest.fixture(scope="session")
def desk_run():
    """The desk-scale synthetic experiment: 2,000 elements, desk preset.

    Training takes minutes on one CPU, so the checkpoint and measured wall
    time are cached under .cache/desk and reused across pytest sessions.
    Delete that directory to retrain from scratch.
    """
    records, n = generate_synthetic_elements(DESK_N_ELEMENTS, seed=DESK_SEED)
    assert n == DESK_N_ELEMENTS
    elements = T.labeled_elements(records)
    split = T.make_split(elements, seed=DESK_SEED)
    screens = screens_by_id(records)

    ckpt = CACHE_DIR / "desk.pt"
    meta_path = CACHE_DIR / "meta.json"
    if ckpt.is_file() and meta_path.is_file():
        model = T.load_checkpoint(ckpt)
        meta = json.loads(meta_path.read_text())
    else:
        CACHE_DIR.mkdir(parents=True, exist_ok=True)
        config = TrainConfig(**(asdict(DESK_PRESET) | {"seed": DESK_SEED}))
        model = T.build_classifier(seed=DESK_SEED, input_hw=config.input_hw)
        t0 = time.time()
        train(model, split, screens, config, checkpoint_path=str(ckpt))
        wall = time.time() - t0
        model = T.load_checkpoint(ckpt)  # best-validation weights
        metrics = evaluate(model, split.test, screens)
        meta = {"wall_seconds": wall, "test_auc": metrics.auc}
        meta_path.write_text(json.dumps(meta))
    return {
        "model": model,
        "records": records,
        "elements": elements,
        "split": split,
        "screens": screens,
        "wall_seconds": meta["wall_seconds"],
        "test_auc": meta["test_auc"],
    }
