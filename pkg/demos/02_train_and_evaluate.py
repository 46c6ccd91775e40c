"""Train a small classifier on synthetic screens and evaluate it.

Uses a reduced resolution and a short schedule so the demo finishes in a
couple of minutes on a laptop CPU. Run: python3 demos/02_train_and_evaluate.py
"""

import tappability as T
from tappability.training import TrainConfig, evaluate, screens_by_id, train

records = T.generate_synthetic_corpus(30, seed=1)
elements = T.labeled_elements(records)
split = T.make_split(elements, seed=1)
screens = screens_by_id(records)

config = TrainConfig(learning_rate=0.01, batch_size=32, epochs=10,
                     decay_epochs=(7, 9), input_hw=(96, 54), seed=1)
model = T.build_classifier(seed=1, input_hw=config.input_hw)

log = train(model, split, screens, config, checkpoint_path="/tmp/demo_model.pt",
            verbose=True)
print(f"trained in {log.wall_seconds:.0f}s, best val AUC {log.best_val_auc}")

metrics = evaluate(model, split.test, screens)
print(f"test precision {metrics.precision:.1f}%  recall {metrics.recall:.1f}%  "
      f"AUC {metrics.auc:.4f}")

# single-element prediction from raw pixels + bbox
el = split.test[0]
result = T.predict(model, screens[el.annotation.screenshot_id], el.annotation.bbox)
print(f"example element {el.ref}: p(tappable)={result.tap_probability:.3f} "
      f"(ground truth: {el.majority_tappable})")
