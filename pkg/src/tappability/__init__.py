"""Predict and explain the perceived tappability of mobile UI elements."""

from .data import (
    BoundingBox,
    DatasetSplit,
    ElementAnnotation,
    ElementNode,
    LabeledElement,
    RaterLabelSet,
    ScreenRecord,
    Screenshot,
    aggregate_labels,
    ingest_corpus,
    labeled_elements,
    make_split,
    select_elements_for_labeling,
    write_corpus,
)
from .synthetic import generate_synthetic_corpus
from .inputs import ModelInput, TransformRecord, build_mask, encode_input
from .net import (
    PredictionResult,
    TapNet,
    build_classifier,
    embed,
    load_checkpoint,
    model_fingerprint,
    predict,
    save_checkpoint,
)
from .training import DESK_PRESET, PAPER_PRESET, TrainConfig, evaluate, train
from .metrics import Metrics, binary_metrics, roc_auc
from .attribution import (
    PixelAttribution,
    dual_baseline_attribution,
    integrated_gradients,
    make_baseline,
)
from .regions import (
    Region,
    RegionAttribution,
    aggregate_regions,
    felzenszwalb_segments,
    merge_to_threshold,
    regions_from_annotations,
)
from .render import render_heatmap
from .retrieval import (
    EmbeddingIndex,
    EmbeddingRecord,
    NeighborResult,
    build_index,
    contrasting_neighbors,
    explain_with_examples,
    load_index,
    save_index,
)
from .pipeline import ExplainResult, explain_query

__version__ = "0.1.0"
