"""Evaluation metrics: rank correlation, range-normalized score error, and
stage-interval overlap."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, ShapeMismatchError
from .segmenter import StageBoundaries


def average_ranks(values) -> np.ndarray:
    """Ranks 1..n with tied values receiving the mean of their positions."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.shape[0], dtype=np.float64)
    i = 0
    while i < x.shape[0]:
        j = i
        while j + 1 < x.shape[0] and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def srcc(true_scores, predicted_scores) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    t = np.asarray(true_scores, dtype=np.float64)
    p = np.asarray(predicted_scores, dtype=np.float64)
    if t.shape != p.shape or t.ndim != 1:
        raise ShapeMismatchError("score lists must be 1-D and of equal length")
    if t.shape[0] < 2:
        raise ConfigurationError("need at least two scores")
    if np.all(t == t[0]) or np.all(p == p[0]):
        raise DegenerateInputError("rank correlation undefined for a constant list")
    rt = average_ranks(t) - (t.shape[0] + 1) / 2.0
    rp = average_ranks(p) - (t.shape[0] + 1) / 2.0
    return float((rt * rp).sum() / np.sqrt((rt * rt).sum() * (rp * rp).sum()))


def relative_l2(true_scores, predicted_scores, score_range) -> float:
    """Mean squared range-normalized absolute error, reported x100."""
    t = np.asarray(true_scores, dtype=np.float64)
    p = np.asarray(predicted_scores, dtype=np.float64)
    if t.shape != p.shape or t.ndim != 1 or t.shape[0] < 1:
        raise ShapeMismatchError("score lists must be 1-D, non-empty, and of equal length")
    lo, hi = score_range
    if not hi > lo:
        raise ConfigurationError(f"degenerate score range {score_range}")
    return float(np.mean((np.abs(t - p) / (hi - lo)) ** 2) * 100.0)


def interval_iou(predicted: StageBoundaries, reference: StageBoundaries, num_frames: int) -> float:
    """Mean per-stage IoU of two stage partitions of the same video.

    Stages are half-open frame intervals; intersection and union are frame
    counts. Per-stage ratios and their mean are computed in exact rational
    arithmetic before the final float conversion.
    """
    if predicted.num_stages != reference.num_stages:
        raise ShapeMismatchError(
            f"stage counts differ: {predicted.num_stages} vs {reference.num_stages}"
        )
    predicted.validate(num_frames)
    reference.validate(num_frames)
    total = Fraction(0)
    stage_pairs = zip(predicted.intervals(num_frames), reference.intervals(num_frames))
    for (a0, a1), (b0, b1) in stage_pairs:
        inter = max(0, min(a1, b1) - max(a0, b0))
        union = (a1 - a0) + (b1 - b0) - inter
        total += Fraction(inter, union)
    return float(total / predicted.num_stages)


def aiou_at_d(per_video_iou, d: float) -> float:
    """Fraction of videos whose stage IoU meets the threshold (inclusive)."""
    ious = list(per_video_iou)
    if not ious:
        raise ConfigurationError("need at least one per-video IoU")
    if not 0.0 <= d <= 1.0:
        raise ConfigurationError(f"threshold {d} outside [0, 1]")
    return sum(1 for v in ious if v >= d) / len(ious)


@dataclass
class MetricsReport:
    """Evaluation summary for one test split.

    ``srcc`` is None when rank correlation is undefined (constant scores);
    the condition is then flagged in ``metadata['degenerate_srcc']``.
    """

    srcc: float | None
    r_l2_x100: float
    aiou: dict[float, float]
    per_video_iou: list[float]
    n: int
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "srcc": self.srcc,
            "r_l2_x100": self.r_l2_x100,
            "aiou": {str(k): v for k, v in self.aiou.items()},
            "per_video_iou": self.per_video_iou,
            "n": self.n,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "MetricsReport":
        return cls(
            srcc=payload["srcc"],
            r_l2_x100=payload["r_l2_x100"],
            aiou={float(k): v for k, v in payload["aiou"].items()},
            per_video_iou=list(payload["per_video_iou"]),
            n=int(payload["n"]),
            metadata=dict(payload.get("metadata", {})),
        )


def save_report(report: MetricsReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_json_dict(), indent=1), encoding="utf-8")


def load_report(path) -> MetricsReport:
    return MetricsReport.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
