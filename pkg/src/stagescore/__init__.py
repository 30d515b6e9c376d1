"""Stage-segmented contrastive score regression for multi-stage action videos.

The pipeline: a gated-temporal-shift 2D conv backbone extracts per-frame
features; a bidirectional recurrent segmenter predicts stage transitions; the
stages are resampled to a common length, contrasted between a query and a
same-class exemplar video, decoded into per-stage difference embeddings with
multi-head cross-attention, and regressed to a relative score anchored on the
exemplar's known score.
"""

from . import backbone, contrast, data, engine, fdcheck, metrics, scorer, segmenter
from .errors import StageScoreError

__version__ = "0.1.0"

__all__ = [
    "StageScoreError",
    "__version__",
    "backbone",
    "contrast",
    "data",
    "engine",
    "fdcheck",
    "metrics",
    "scorer",
    "segmenter",
]
