"""Contrasting nearest neighbors: similar examples from both predicted classes.

Builds an embedding index over a corpus, then for one query element fetches
the closest predicted-tappable and predicted-non-tappable examples, sorted by
L2 distance. Run: python3 demos/04_contrasting_neighbors.py
"""

import tappability as T
from tappability.retrieval import load_index, save_index

records = T.generate_synthetic_corpus(15, seed=3)
model = T.build_classifier(seed=0, input_hw=(96, 54))

# an untrained model's probabilities cluster near 0.5, so use trivial cuts
# here; a trained model separates the classes and the default (0.35, 0.65)
# band drops only genuinely ambiguous corpus entries
index = T.build_index(model, records, cuts=(0.5, 0.5))
print(f"index: {len(index.tappable)} tappable / {len(index.non_tappable)} non-tappable")

query = records[0].annotations[0]
result, neighbors = T.explain_with_examples(
    model, index, records[0].screenshot, query.bbox, k=5)
print(f"query {query.ref}: p(tappable)={result.tap_probability:.3f}")
for side, found in (("tappable", neighbors.tappable_neighbors),
                    ("non-tappable", neighbors.non_tappable_neighbors)):
    print(f"  nearest {side}:")
    for rec_found, dist in found:
        print(f"    {rec_found.element_ref}  d={dist:.3f}  "
              f"p={rec_found.tap_probability:.3f}")

# the index round-trips through its on-disk format losslessly
save_index(index, "/tmp/demo_index")
reloaded = load_index("/tmp/demo_index")
assert reloaded.checkpoint_fingerprint == index.checkpoint_fingerprint
print("saved and reloaded the index from /tmp/demo_index")
