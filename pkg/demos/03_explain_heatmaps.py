"""Region-attribution heatmaps for one prediction.

Computes integrated-gradients pixel attributions against the dual
black/white baseline, aggregates them over regions (native UI boxes here;
felzenszwalb segments when no boxes are available), and writes the overlay
and filtered renderings as PNGs. Run: python3 demos/03_explain_heatmaps.py
"""

from PIL import Image

import tappability as T

records = T.generate_synthetic_corpus(4, seed=9)
model = T.build_classifier(seed=0, input_hw=(96, 54))

rec = records[0]
target = rec.annotations[0]

result = T.explain_query(model, rec.screenshot, target.bbox, steps=64,
                         region_mode="ui_bbox", annotations=rec.annotations)
print(f"p(tappable) = {result.prediction.tap_probability:.3f}")

print("regions ranked by attribution density:")
for score in result.region_attr.ranked:
    print(f"  rank {score.rank}: bbox={score.region.bbox.as_list()} "
          f"total={score.total:+.4f} density={score.density:+.6f}")

Image.fromarray(result.overlay).save("/tmp/demo_overlay.png")
Image.fromarray(result.filtered).save("/tmp/demo_filtered.png")
print("wrote /tmp/demo_overlay.png and /tmp/demo_filtered.png")

# the same query without region annotations falls back to segmentation
fallback = T.explain_query(model, rec.screenshot, target.bbox, steps=16,
                           region_mode="felzenszwalb")
print(f"felzenszwalb fallback produced {len(fallback.region_attr.ranked)} regions")
