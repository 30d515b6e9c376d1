"""Dataset types, synthetic generation, storage, and sampling."""

from .sampling import sample_training_pair, select_exemplars
from .store import FORMAT_VERSION, MANIFEST_NAME, load_dataset, save_dataset
from .synth import class_parameter_table, generate_synthetic_dataset, score_from_deviations
from .types import (
    MIN_STAGE_FRAMES,
    AnnotatedVideo,
    Dataset,
    PairSample,
    Split,
    SynthSpec,
    default_transition_windows,
    transition_labels_from_stage_labels,
)

__all__ = [
    "MIN_STAGE_FRAMES",
    "FORMAT_VERSION",
    "MANIFEST_NAME",
    "AnnotatedVideo",
    "Dataset",
    "PairSample",
    "Split",
    "SynthSpec",
    "class_parameter_table",
    "default_transition_windows",
    "generate_synthetic_dataset",
    "load_dataset",
    "sample_training_pair",
    "save_dataset",
    "score_from_deviations",
    "select_exemplars",
    "transition_labels_from_stage_labels",
]
