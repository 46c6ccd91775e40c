"""Drive the HTTP API in-process: predict, explain, and thumbnails.

The same app serves over a socket via `tap serve`; here an in-process test
client keeps the demo self-contained. Run: python3 demos/05_service.py
"""

import base64
import io

from fastapi.testclient import TestClient
from PIL import Image

import tappability as T
from tappability.service import create_app

records = T.generate_synthetic_corpus(8, seed=5)
model = T.build_classifier(seed=0, input_hw=(96, 54))
index = T.build_index(model, records, cuts=(0.5, 0.5))
client = TestClient(create_app(model, index=index, corpus=records))

rec = records[0]
buf = io.BytesIO()
Image.fromarray(rec.screenshot.pixels).save(buf, format="PNG")
image_b64 = base64.b64encode(buf.getvalue()).decode("ascii")
bbox = rec.annotations[0].bbox.as_list()

r = client.post("/api/predict", json={"image": image_b64, "bbox": bbox})
print("predict:", r.json())

r = client.post("/api/explain", json={
    "image": image_b64, "bbox": bbox,
    "options": {"steps": 16, "k": 3}})
body = r.json()
print(f"explain: p={body['tap_probability']:.3f}, "
      f"{len(body['ranked_regions'])} regions, "
      f"neighbors_available={body['neighbors_available']}")

first = body["neighbors"]["tappable"] or body["neighbors"]["non_tappable"]
thumb = client.get(first[0]["thumbnail_refs"]["crop"])
print(f"neighbor crop thumbnail: {thumb.headers['content-type']}, "
      f"{len(thumb.content)} bytes")

# malformed requests come back as structured errors, not stack traces
r = client.post("/api/predict", json={"image": image_b64, "bbox": [5, 5, 5, 9]})
print("degenerate bbox ->", r.status_code, r.json())
