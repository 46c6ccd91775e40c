from __future__ import annotations

import base64
import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

import tappability as T
from tappability.service import create_app


def png_b64(pixels: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(pixels).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


@pytest.fixture(scope="module")
def client(tiny_model, synth_records):
    index = T.build_index(tiny_model, synth_records, cuts=(0.5, 0.5))
    app = create_app(tiny_model, index=index, corpus=synth_records)
    return TestClient(app)


@pytest.fixture(scope="module")
def query(synth_records):
    rec = synth_records[0]
    return png_b64(rec.screenshot.pixels), rec.annotations[0].bbox.as_list()


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    body = r.json()
    assert body["model_loaded"] and body["index_loaded"]
    assert len(body["fingerprint"]) == 64


def test_predict_ok(client, query):
    image, bbox = query
    r = client.post("/api/predict", json={"image": image, "bbox": bbox})
    assert r.status_code == 200
    body = r.json()
    assert 0.0 <= body["tap_probability"] <= 1.0
    assert body["decision"] == (body["tap_probability"] >= 0.5)


def test_predict_deterministic_bytes(client, query):
    image, bbox = query
    payload = {"image": image, "bbox": bbox}
    a = client.post("/api/predict", json=payload)
    b = client.post("/api/predict", json=payload)
    assert a.content == b.content


def test_predict_bad_base64(client):
    r = client.post("/api/predict", json={"image": "not base64!!!", "bbox": [0, 0, 1, 1]})
    assert r.status_code == 400
    body = r.json()
    assert set(body) == {"code", "message", "field"}
    assert body["code"] == "bad_image" and body["field"] == "image"


def test_predict_degenerate_bbox(client, query):
    image, _ = query
    r = client.post("/api/predict", json={"image": image, "bbox": [10, 10, 10, 20]})
    assert r.status_code == 400
    assert r.json()["code"] == "degenerate bbox"
    assert r.json()["field"] == "bbox"


def test_predict_bbox_out_of_bounds(client, query):
    image, _ = query
    r = client.post("/api/predict", json={"image": image, "bbox": [0, 0, 9999, 10]})
    assert r.status_code == 400
    assert r.json()["code"] == "bbox_out_of_bounds"


def test_predict_image_too_large_dimensions(client):
    big = np.zeros((4097, 8, 3), dtype=np.uint8)
    r = client.post("/api/predict", json={"image": png_b64(big), "bbox": [0, 0, 4, 4]})
    assert r.status_code == 413
    assert r.json()["code"] == "image_too_large"


def test_explain_felzenszwalb_default(client, query):
    image, bbox = query
    r = client.post("/api/explain", json={
        "image": image, "bbox": bbox, "options": {"steps": 4}})
    assert r.status_code == 200
    body = r.json()
    assert 0.0 <= body["tap_probability"] <= 1.0
    assert body["neighbors_available"]
    # both heatmaps decode as PNG
    for key in ("heatmap_overlay_png", "filtered_png"):
        img = Image.open(io.BytesIO(base64.b64decode(body[key])))
        assert img.size[0] > 0
    ranks = [reg["rank"] for reg in body["ranked_regions"]]
    assert ranks == list(range(len(ranks)))
    densities = [reg["density"] for reg in body["ranked_regions"]]
    assert densities == sorted(densities, reverse=True)


def test_explain_ui_bbox_regions(client, query, synth_records):
    image, bbox = query
    regions = [{"element_id": a.element_id, "bbox": a.bbox.as_list(),
                "view_type": a.view_type}
               for a in synth_records[0].annotations]
    r = client.post("/api/explain", json={
        "image": image, "bbox": bbox,
        "options": {"steps": 2, "region_mode": "ui_bbox", "regions": regions}})
    assert r.status_code == 200
    body = r.json()
    assert len(body["ranked_regions"]) == len(regions)
    assert all(reg["rectangular"] for reg in body["ranked_regions"])
    # neighbors: two sides, sorted by ascending distance
    for side in ("tappable", "non_tappable"):
        dists = [n["distance"] for n in body["neighbors"][side]]
        assert dists == sorted(dists)
        for n in body["neighbors"][side]:
            assert n["thumbnail_refs"]["crop"].startswith("/api/corpus/thumbnail?")


def test_explain_deterministic_bytes(client, query):
    image, bbox = query
    payload = {"image": image, "bbox": bbox, "options": {"steps": 2}}
    a = client.post("/api/explain", json=payload)
    b = client.post("/api/explain", json=payload)
    assert a.status_code == 200
    assert a.content == b.content


def test_explain_ui_bbox_without_regions_rejected(client, query):
    image, bbox = query
    r = client.post("/api/explain", json={
        "image": image, "bbox": bbox, "options": {"steps": 2, "region_mode": "ui_bbox"}})
    assert r.status_code == 400
    assert r.json()["code"] == "bad_regions"


def test_explain_option_validation(client, query):
    image, bbox = query
    cases = [
        ({"steps": 0}, "options.steps"),
        ({"steps": 2048}, "options.steps"),
        ({"k": 0}, "options.k"),
        ({"region_mode": "watershed"}, "options.region_mode"),
    ]
    for opts, field in cases:
        r = client.post("/api/explain", json={"image": image, "bbox": bbox, "options": opts})
        assert r.status_code == 400, opts
        assert r.json()["field"] == field


def test_explain_bad_region_row(client, query):
    image, bbox = query
    r = client.post("/api/explain", json={
        "image": image, "bbox": bbox,
        "options": {"steps": 2, "region_mode": "ui_bbox",
                    "regions": [{"element_id": "x"}]}})  # missing bbox
    assert r.status_code == 400
    assert r.json()["code"] == "bad_regions"


def test_explain_index_mismatch(tiny_model, synth_records, query):
    other = T.build_classifier(seed=99, input_hw=tiny_model.input_hw)
    index = T.build_index(other, synth_records, cuts=(0.5, 0.5))
    app = create_app(tiny_model, index=index, corpus=synth_records)
    image, bbox = query
    r = TestClient(app).post("/api/explain", json={
        "image": image, "bbox": bbox, "options": {"steps": 2}})
    assert r.status_code == 409
    assert r.json()["code"] == "index_mismatch"


def test_explain_without_index_still_works(tiny_model, query):
    app = create_app(tiny_model)
    image, bbox = query
    r = TestClient(app).post("/api/explain", json={
        "image": image, "bbox": bbox, "options": {"steps": 2}})
    assert r.status_code == 200
    body = r.json()
    assert not body["neighbors_available"]
    assert body["neighbors"] is None


def test_thumbnail_full_screenshot(client, synth_records):
    rec = synth_records[0]
    r = client.get("/api/corpus/thumbnail", params={"id": rec.screenshot.id})
    assert r.status_code == 200
    assert r.headers["content-type"] == "image/png"
    assert "immutable" in r.headers["cache-control"]
    img = np.asarray(Image.open(io.BytesIO(r.content)))
    assert np.array_equal(img, rec.screenshot.pixels)


def test_thumbnail_element_crop_matches_bbox(client, synth_records):
    rec = synth_records[0]
    ann = rec.annotations[1]
    r = client.get("/api/corpus/thumbnail",
                   params={"id": rec.screenshot.id, "element": ann.element_id})
    assert r.status_code == 200
    img = np.asarray(Image.open(io.BytesIO(r.content)))
    bb = ann.bbox
    assert np.array_equal(img, rec.screenshot.pixels[bb.y_min:bb.y_max, bb.x_min:bb.x_max])


def test_thumbnail_unknown_ids(client, synth_records):
    r = client.get("/api/corpus/thumbnail", params={"id": "nope"})
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_id"
    r = client.get("/api/corpus/thumbnail",
                   params={"id": synth_records[0].screenshot.id, "element": "nope"})
    assert r.status_code == 404
    assert r.json()["field"] == "element"
