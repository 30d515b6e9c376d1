"""Procedure segmentation: per-frame transition prediction, boundary
selection, the transition classification loss, and stage partitioning with
temporal resampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigurationError, InvalidLabelError, ShapeMismatchError

DEFAULT_MIN_GAP = 4
_LOG_CLAMP = 1e-12


@dataclass(frozen=True)
class StageBoundaries:
    """Frame indices where a new stage begins; stage k spans [t_{k-1}, t_k)."""

    transitions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(int(t) for t in self.transitions))
        if not self.transitions:
            raise ConfigurationError("need at least one transition")
        if any(b <= a for a, b in zip(self.transitions, self.transitions[1:])):
            raise ConfigurationError("transitions must be strictly increasing")

    @property
    def num_stages(self) -> int:
        return len(self.transitions) + 1

    @classmethod
    def from_transition_labels(cls, transition_labels) -> "StageBoundaries":
        idx = np.flatnonzero(np.asarray(transition_labels))
        if idx.size == 0:
            raise InvalidLabelError("transition labels mark no transitions")
        return cls(tuple(int(i) for i in idx))

    def validate(self, num_frames: int, min_gap: int = 1) -> None:
        cuts = (0, *self.transitions, num_frames)
        for a, b in zip(cuts, cuts[1:]):
            if b - a < min_gap:
                raise ConfigurationError(
                    f"stage [{a}, {b}) shorter than min_gap={min_gap} for L={num_frames}"
                )

    def intervals(self, num_frames: int) -> list[tuple[int, int]]:
        cuts = (0, *self.transitions, num_frames)
        return list(zip(cuts, cuts[1:]))


@dataclass(frozen=True, eq=False)
class StageFeatureSet:
    """Resampled per-stage feature sequences and their time-mean vectors."""

    per_stage: torch.Tensor  # [K_s, M, D]
    pooled: torch.Tensor  # [K_s, D]


class TransitionPredictor(nn.Module):
    """Bidirectional recurrent per-frame transition classifier."""

    def __init__(self, feature_dim: int, hidden_dim: int = 64):
        super().__init__()
        if feature_dim < 1 or hidden_dim < 1:
            raise ConfigurationError("feature_dim and hidden_dim must be positive")
        self.gru = nn.GRU(feature_dim, hidden_dim, batch_first=True, bidirectional=True)
        self.head = nn.Linear(2 * hidden_dim, 2)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        """[L, D] -> [L, 2] row-stochastic; column 1 = transition probability."""
        if features.dim() != 2:
            raise ShapeMismatchError(f"expected [L, D] features, got {tuple(features.shape)}")
        hidden, _ = self.gru(features.unsqueeze(0))
        return F.softmax(self.head(hidden.squeeze(0)), dim=-1)


def predict_transition_probs(
    features: torch.Tensor, predictor: TransitionPredictor, min_frames: int = 1
) -> torch.Tensor:
    if features.shape[0] < min_frames:
        raise ConfigurationError(
            f"need at least {min_frames} frames, got {features.shape[0]}"
        )
    return predictor(features)


def uniform_boundaries(num_frames: int, num_stages: int) -> StageBoundaries:
    return StageBoundaries(
        tuple(round(k * num_frames / num_stages) for k in range(1, num_stages))
    )


def select_boundaries(
    probs, num_transitions: int, min_gap: int = DEFAULT_MIN_GAP
) -> StageBoundaries:
    """Greedy pick of the highest-probability transition frames.

    Candidates are visited in descending probability (ties to the smaller
    frame index) and rejected when closer than ``min_gap`` to an accepted
    frame or to either sequence end. If fewer than ``num_transitions`` frames
    survive, falls back to the uniform partition, so the function is total.
    """
    if num_transitions < 1:
        raise ConfigurationError("num_transitions must be at least 1")
    if torch.is_tensor(probs):
        probs = probs.detach().cpu().numpy()
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim == 2:
        p = p[:, 1]
    length = p.shape[0]
    num_stages = num_transitions + 1
    if length < num_stages * min_gap:
        raise ConfigurationError(
            f"{length} frames cannot host {num_stages} stages of at least {min_gap}"
        )

    order = sorted(range(length), key=lambda i: (-p[i], i))
    accepted: list[int] = []
    for i in order:
        if i < min_gap or i > length - min_gap:
            continue
        if all(abs(i - a) >= min_gap for a in accepted):
            accepted.append(i)
            if len(accepted) == num_transitions:
                break

    if len(accepted) < num_transitions:
        result = uniform_boundaries(length, num_stages)
    else:
        result = StageBoundaries(tuple(sorted(accepted)))
    result.validate(length, min_gap=min_gap)
    return result


def segmentation_loss(
    probs: torch.Tensor, transition_labels, balance_positive: bool = True
) -> torch.Tensor:
    """Per-frame cross-entropy between predicted transition probabilities and
    binary transition labels.

    With ``balance_positive`` the rare positive frames are up-weighted by the
    negative/positive count ratio; the result stays a weighted mean, so a
    uniform predictor scores ln 2 regardless of weighting.
    """
    labels = torch.as_tensor(np.asarray(transition_labels), dtype=torch.long)
    if probs.dim() != 2 or probs.shape[1] != 2:
        raise ShapeMismatchError(f"expected [L, 2] probabilities, got {tuple(probs.shape)}")
    if labels.shape[0] != probs.shape[0]:
        raise ShapeMismatchError("probabilities and labels must have equal length")
    if ((labels != 0) & (labels != 1)).any():
        raise InvalidLabelError("transition labels must be 0 or 1")

    picked = probs[torch.arange(probs.shape[0]), labels]
    ce = -torch.log(picked.clamp(min=_LOG_CLAMP))
    num_pos = int(labels.sum())
    num_neg = labels.shape[0] - num_pos
    if balance_positive and num_pos > 0 and num_neg > 0:
        weights = torch.where(
            labels == 1,
            torch.tensor(num_neg / num_pos, dtype=probs.dtype),
            torch.tensor(1.0, dtype=probs.dtype),
        )
    else:
        weights = torch.ones_like(ce)
    return (weights * ce).sum() / weights.sum()


def linear_resample(segment: torch.Tensor, size: int) -> torch.Tensor:
    """Resample a [T, D] sequence to [size, D] by linear interpolation.

    Sample positions are j*(T-1)/(size-1), anchoring the first and last output
    rows to the first and last input rows. A single-row segment broadcasts.
    """
    if size < 2:
        raise ConfigurationError("resample size must be at least 2")
    if segment.dim() != 2 or segment.shape[0] < 1:
        raise ShapeMismatchError(f"expected non-empty [T, D] segment, got {tuple(segment.shape)}")
    length = segment.shape[0]
    if length == 1:
        return segment.repeat(size, 1)
    pos = torch.arange(size, dtype=torch.float64) * (length - 1) / (size - 1)
    lo = pos.floor().long().clamp(max=length - 2)
    w = (pos - lo.to(torch.float64)).to(segment.dtype).unsqueeze(1)
    return (1.0 - w) * segment[lo] + w * segment[lo + 1]


def partition_and_resample(
    features: torch.Tensor, boundaries: StageBoundaries, size: int
) -> StageFeatureSet:
    """Split [L, D] features at the boundaries and resample every stage to a
    common temporal size. Boundary indices are constants: gradients flow
    through the feature values only."""
    if features.dim() != 2:
        raise ShapeMismatchError(f"expected [L, D] features, got {tuple(features.shape)}")
    boundaries.validate(features.shape[0], min_gap=1)
    per_stage = torch.stack(
        [linear_resample(features[a:b], size) for a, b in boundaries.intervals(features.shape[0])]
    )
    return StageFeatureSet(per_stage=per_stage, pooled=per_stage.mean(dim=1))
