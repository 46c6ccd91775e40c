"""``tap`` command-line interface."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np
from PIL import Image

from . import data as data_mod
from . import synthetic as synth_mod
from .net import build_classifier, load_checkpoint, predict, save_checkpoint
from .training import PRESETS, TrainConfig, evaluate, screens_by_id, train
from .pipeline import explain_query
from .retrieval import build_index as build_index_op
from .retrieval import contrasting_neighbors, load_index, save_index
from .net import model_fingerprint


def _parse_bbox(text: str) -> data_mod.BoundingBox:
    return data_mod.BoundingBox.from_list([int(v) for v in text.split(",")])


def _load_image(path: str) -> data_mod.Screenshot:
    pixels = np.asarray(Image.open(path).convert("RGB"))
    return data_mod.Screenshot(id=Path(path).stem, pixels=pixels)


@click.group()
def main():
    """Predict and explain mobile UI tappability from pixels."""


# -- tap data ----------------------------------------------------------------

@main.group()
def data():
    """Corpus ingestion, splitting, and synthesis."""


@data.command("ingest")
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def data_ingest(root, manifest, out_path):
    """Validate a corpus and write the accepted rows (plus a rejection report)."""
    records, rejections = data_mod.ingest_corpus(root, manifest)
    elements = data_mod.labeled_elements(records)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in records:
            votes = {v.element_ref: v for v in rec.labels}
            for ann in rec.annotations:
                fh.write(json.dumps(data_mod._manifest_row(
                    rec.screenshot.id, ann, votes[ann.ref]), sort_keys=True) + "\n")
    click.echo(f"accepted {sum(len(r.annotations) for r in records)} elements "
               f"over {len(records)} screens ({len(elements)} with full vote sets)")
    if rejections:
        report = Path(out_path).with_suffix(".rejections.jsonl")
        with open(report, "w", encoding="utf-8") as fh:
            for rej in rejections:
                fh.write(json.dumps({"line": rej.line, "element_ref": list(rej.element_ref),
                                     "reason": rej.reason}, sort_keys=True) + "\n")
        click.echo(f"rejected {len(rejections)} rows; report at {report}")


@data.command("split")
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--by-screen", is_flag=True, help="Group split assignment by screen.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def data_split(root, manifest, seed, by_screen, out_path):
    """Write a deterministic 80/10/10 split as JSON element-ref lists."""
    records, _ = data_mod.ingest_corpus(root, manifest)
    elements = data_mod.labeled_elements(records)
    split = data_mod.make_split(elements, seed=seed, by_screen=by_screen)
    payload = {
        "seed": seed,
        "train": [list(el.ref) for el in split.train],
        "validation": [list(el.ref) for el in split.validation],
        "test": [list(el.ref) for el in split.test],
    }
    Path(out_path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
    click.echo(f"split {len(split.train)}/{len(split.validation)}/{len(split.test)}")


@data.command("synth")
@click.option("--n", "n_screens", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def data_synth(n_screens, seed, out_dir):
    """Generate a synthetic corpus with known ground truth."""
    records = synth_mod.generate_synthetic_corpus(n_screens, seed)
    manifest = data_mod.write_corpus(records, out_dir)
    n_el = sum(len(r.annotations) for r in records)
    click.echo(f"wrote {len(records)} screens / {n_el} elements; manifest at {manifest}")


# -- tap model ---------------------------------------------------------------

@main.group()
def model():
    """Training, evaluation, and single-query prediction."""


@model.command("train")
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default="desk", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--epochs", type=int, default=None, help="Override the preset's epoch count.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def model_train(corpus, preset, seed, epochs, out_path):
    """Train a classifier and checkpoint the best-validation weights."""
    records, _ = data_mod.ingest_corpus(corpus)
    elements = data_mod.labeled_elements(records)
    split = data_mod.make_split(elements, seed=seed)
    cfg_kwargs = asdict(PRESETS[preset]) | {"seed": seed}
    if epochs is not None:
        cfg_kwargs["epochs"] = epochs
        cfg_kwargs["decay_epochs"] = tuple(e for e in cfg_kwargs["decay_epochs"] if e < epochs)
    config = TrainConfig(**cfg_kwargs)
    net = build_classifier(seed=seed, input_hw=config.input_hw)
    log = train(net, split, screens_by_id(records), config, checkpoint_path=out_path,
                verbose=True)
    click.echo(f"done in {log.wall_seconds:.0f}s; best val AUC: {log.best_val_auc}")


@model.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--seed", type=int, default=0, show_default=True,
              help="Split seed; evaluation runs on the test partition.")
@click.option("--threshold", type=float, default=0.5, show_default=True)
def model_eval(checkpoint, corpus, seed, threshold):
    net = load_checkpoint(checkpoint)
    records, _ = data_mod.ingest_corpus(corpus)
    elements = data_mod.labeled_elements(records)
    split = data_mod.make_split(elements, seed=seed)
    m = evaluate(net, split.test, screens_by_id(records), threshold)
    click.echo(json.dumps({
        "precision_pct": m.precision, "recall_pct": m.recall, "auc": m.auc,
        "tp": m.tp, "fp": m.fp, "tn": m.tn, "fn": m.fn,
    }, sort_keys=True))


@model.command("predict")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bbox", required=True, help="x_min,y_min,x_max,y_max")
@click.option("--threshold", type=float, default=0.5, show_default=True)
def model_predict(checkpoint, image_path, bbox, threshold):
    net = load_checkpoint(checkpoint)
    result = predict(net, _load_image(image_path), _parse_bbox(bbox), threshold)
    click.echo(json.dumps({
        "tap_probability": result.tap_probability, "decision": result.decision,
    }, sort_keys=True))


# -- tap explain -------------------------------------------------------------

@main.command("explain")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bbox", required=True, help="x_min,y_min,x_max,y_max")
@click.option("--regions", "regions_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSONL manifest of UI element annotations to use as regions.")
@click.option("--felzenszwalb", "use_felzenszwalb", is_flag=True,
              help="Force segmentation-based regions.")
@click.option("--steps", type=int, default=128, show_default=True)
@click.option("--out-prefix", required=True)
def explain(checkpoint, image_path, bbox, regions_path, use_felzenszwalb, steps, out_prefix):
    """Write <prefix>_overlay.png, <prefix>_filtered.png, <prefix>_regions.json."""
    net = load_checkpoint(checkpoint)
    screenshot = _load_image(image_path)
    annotations = None
    region_mode = "felzenszwalb"
    if regions_path and not use_felzenszwalb:
        region_mode = "ui_bbox"
        annotations = []
        with open(regions_path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                if not line.strip():
                    continue
                row = json.loads(line)
                annotations.append(data_mod.ElementAnnotation(
                    screenshot_id=screenshot.id,
                    element_id=str(row.get("element_id", i)),
                    bbox=data_mod.BoundingBox.from_list(row["bbox"]),
                    view_type=str(row.get("view_type", "TextView")),
                ))
    result = explain_query(net, screenshot, _parse_bbox(bbox), steps=steps,
                           region_mode=region_mode, annotations=annotations)
    Image.fromarray(result.overlay).save(f"{out_prefix}_overlay.png")
    Image.fromarray(result.filtered).save(f"{out_prefix}_filtered.png")
    with open(f"{out_prefix}_regions.json", "w", encoding="utf-8") as fh:
        json.dump([
            {"bbox": s.region.bbox.as_list(), "total": s.total,
             "density": s.density, "rank": s.rank}
            for s in result.region_attr.ranked
        ], fh, sort_keys=True, indent=2)
    click.echo(f"tap_probability={result.prediction.tap_probability:.4f} "
               f"decision={result.prediction.decision}")


# -- tap index ---------------------------------------------------------------

@main.group("index")
def index_group():
    """Embedding index build and query."""


@index_group.command("build")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--cuts", default="0.35,0.65", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def index_build(checkpoint, corpus, cuts, out_dir):
    net = load_checkpoint(checkpoint)
    records, _ = data_mod.ingest_corpus(corpus)
    lower, upper = (float(v) for v in cuts.split(","))
    idx = build_index_op(net, records, cuts=(lower, upper))
    save_index(idx, out_dir)
    click.echo(f"index: {len(idx.tappable)} tappable / {len(idx.non_tappable)} non-tappable")


@index_group.command("query")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bbox", required=True, help="x_min,y_min,x_max,y_max")
@click.option("--k", type=int, default=5, show_default=True)
def index_query(checkpoint, index_dir, image_path, bbox, k):
    net = load_checkpoint(checkpoint)
    idx = load_index(index_dir)
    result = predict(net, _load_image(image_path), _parse_bbox(bbox))
    neighbors = contrasting_neighbors(idx, result.embedding, k=k,
                                      fingerprint=model_fingerprint(net))
    click.echo(json.dumps({
        "tap_probability": result.tap_probability,
        "tappable": [{"element_ref": list(r.element_ref), "distance": d,
                      "tap_probability": r.tap_probability}
                     for r, d in neighbors.tappable_neighbors],
        "non_tappable": [{"element_ref": list(r.element_ref), "distance": d,
                          "tap_probability": r.tap_probability}
                         for r, d in neighbors.non_tappable_neighbors],
    }, sort_keys=True, indent=2))


# -- tap serve ---------------------------------------------------------------

@main.command("serve")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--index", "index_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--corpus", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--threshold", type=float, default=0.5, show_default=True)
def serve(checkpoint, index_dir, corpus, port, workers, threshold):
    """Start the HTTP service (config overridable via TAP_* environment variables)."""
    import uvicorn

    from .service import create_app

    net = load_checkpoint(checkpoint)
    idx = load_index(index_dir) if index_dir else None
    records = data_mod.ingest_corpus(corpus)[0] if corpus else None
    app = create_app(net, index=idx, corpus=records, threshold=threshold)
    uvicorn.run(app, host="0.0.0.0", port=port, workers=workers)


def entrypoint():
    main(auto_envvar_prefix="TAP")


if __name__ == "__main__":
    entrypoint()
