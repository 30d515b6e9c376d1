"""Training, inference, evaluation, checkpointing, and configuration."""

from .checkpoint import (
    Checkpoint,
    apply_tensors,
    load_archive,
    load_checkpoint,
    make_checkpoint,
    save_archive,
    save_checkpoint,
)
from .config import TrainConfig, config_from_dict, load_train_config
from .inference import InferenceDetails, VideoEncoder, evaluate, evaluate_predictions, infer_score
from .model import ScoringHead, StageScoreModel, build_model
from .train import StepRecord, TrainingLog, cosine_lr, ground_truth_boundaries, pair_forward, train

__all__ = [
    "Checkpoint",
    "InferenceDetails",
    "ScoringHead",
    "StageScoreModel",
    "StepRecord",
    "TrainConfig",
    "TrainingLog",
    "VideoEncoder",
    "apply_tensors",
    "build_model",
    "config_from_dict",
    "cosine_lr",
    "evaluate",
    "evaluate_predictions",
    "ground_truth_boundaries",
    "infer_score",
    "load_archive",
    "load_checkpoint",
    "load_train_config",
    "make_checkpoint",
    "pair_forward",
    "save_archive",
    "save_checkpoint",
    "train",
]
