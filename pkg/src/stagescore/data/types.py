"""Core dataset types for annotated multi-stage action videos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DataError, InvalidLabelError

#: Shortest stage (in frames) the pipeline guarantees and the generator enforces.
MIN_STAGE_FRAMES = 4


def transition_labels_from_stage_labels(stage_labels) -> np.ndarray:
    """Binary per-frame labels marking the first frame of every new stage.

    Frame 0 is never a transition; frame i is a transition iff its stage label
    differs from frame i-1's.
    """
    labels = np.asarray(stage_labels, dtype=np.int64)
    if labels.ndim != 1 or labels.size == 0:
        raise InvalidLabelError("stage_labels must be a non-empty 1-D sequence")
    if np.any(np.diff(labels) < 0):
        raise InvalidLabelError("stage_labels must be non-decreasing")
    out = np.zeros(labels.shape, dtype=np.int64)
    out[1:] = (labels[1:] != labels[:-1]).astype(np.int64)
    return out


@dataclass(frozen=True, eq=False)
class AnnotatedVideo:
    """A single action video with per-frame stage labels and a quality score."""

    id: str
    frames: np.ndarray  # float32 [L, C, H, W]
    class_code: str
    score: float
    stage_labels: np.ndarray  # int64 [L], non-decreasing, values 0..K_s-1
    transition_labels: np.ndarray  # int64 [L], 1 where a new stage begins

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    def validate(self, num_stages: int, score_range: tuple[float, float]) -> None:
        if self.frames.ndim != 4:
            raise DataError(f"video {self.id}: frames must be [L, C, H, W]")
        length = self.num_frames
        if self.stage_labels.shape != (length,) or self.transition_labels.shape != (length,):
            raise DataError(f"video {self.id}: label arrays must have length {length}")
        if np.any(np.diff(self.stage_labels) < 0):
            raise InvalidLabelError(f"video {self.id}: stage_labels must be non-decreasing")
        present = np.unique(self.stage_labels)
        if not np.array_equal(present, np.arange(num_stages)):
            raise InvalidLabelError(
                f"video {self.id}: stage_labels must attain every value 0..{num_stages - 1}"
            )
        expected = transition_labels_from_stage_labels(self.stage_labels)
        if not np.array_equal(expected, self.transition_labels):
            raise InvalidLabelError(f"video {self.id}: transition_labels violate the labeling rule")
        lo, hi = score_range
        if not (lo <= self.score <= hi):
            raise DataError(f"video {self.id}: score {self.score} outside range {score_range}")


@dataclass(frozen=True)
class Split:
    """Train/test membership by video id."""

    train: tuple[str, ...]
    test: tuple[str, ...]


@dataclass(eq=False)
class Dataset:
    """An immutable collection of annotated videos with a train/test split."""

    videos: list[AnnotatedVideo]
    score_range: tuple[float, float]
    num_stages: int
    split: Split

    def __post_init__(self):
        self._by_id = {v.id: v for v in self.videos}
        self.validate()

    def validate(self) -> None:
        lo, hi = self.score_range
        if not lo < hi:
            raise DataError(f"score_range must satisfy min < max, got {self.score_range}")
        if len(self._by_id) != len(self.videos):
            raise DataError("duplicate video ids")
        for vid in self.split.train + self.split.test:
            if vid not in self._by_id:
                raise DataError(f"split references unknown video id {vid!r}")
        train_classes = {self._by_id[i].class_code for i in self.split.train}
        test_classes = {self._by_id[i].class_code for i in self.split.test}
        missing = test_classes - train_classes
        if missing:
            raise DataError(f"test classes absent from train split: {sorted(missing)}")
        for v in self.videos:
            v.validate(self.num_stages, self.score_range)

    def video(self, video_id: str) -> AnnotatedVideo:
        try:
            return self._by_id[video_id]
        except KeyError:
            raise DataError(f"unknown video id {video_id!r}") from None

    def train_videos(self) -> list[AnnotatedVideo]:
        return [self._by_id[i] for i in self.split.train]

    def test_videos(self) -> list[AnnotatedVideo]:
        return [self._by_id[i] for i in self.split.test]

    def train_videos_of_class(self, class_code: str) -> list[AnnotatedVideo]:
        return [v for v in self.train_videos() if v.class_code == class_code]


@dataclass(frozen=True, eq=False)
class PairSample:
    """A (query, exemplar) pair sharing a class code."""

    query: AnnotatedVideo
    exemplar: AnnotatedVideo

    def __post_init__(self):
        if self.query.class_code != self.exemplar.class_code:
            raise DataError("pair members must share a class code")
        if self.query.id == self.exemplar.id:
            raise DataError("pair members must be distinct videos")


def default_transition_windows(num_frames: int, num_stages: int) -> tuple[tuple[int, int], ...]:
    """Half-open sampling windows centered at the uniform transition points."""
    half = max(1, round(num_frames / 12))
    windows = []
    for k in range(1, num_stages):
        center = round(k * num_frames / num_stages)
        windows.append((center - half, center + half))
    return tuple(windows)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic multi-stage video generator.

    ``transition_windows`` holds one half-open frame range [lo, hi) per
    transition; each video samples its transition frames uniformly from them.
    ``noise_std`` scales the per-stage parameter deviations that both perturb
    the rendered motion and determine the quality score.
    """

    num_videos: int
    num_classes: int
    seed: int = 0
    num_frames: int = 96
    channels: int = 3
    height: int = 32
    width: int = 32
    num_stages: int = 3
    transition_windows: tuple[tuple[int, int], ...] | None = None
    noise_std: float = 1.0
    score_range: tuple[float, float] = (0.0, 100.0)
    test_fraction: float = 0.2
    penalty_weight: float = 8.0

    def resolved_windows(self) -> tuple[tuple[int, int], ...]:
        if self.transition_windows is not None:
            return tuple(tuple(w) for w in self.transition_windows)
        return default_transition_windows(self.num_frames, self.num_stages)

    def validate(self) -> None:
        if self.num_classes < 1:
            raise ConfigurationError("num_classes must be positive")
        if self.num_videos < 2 * self.num_classes:
            raise ConfigurationError("need at least 2 videos per class")
        if min(self.channels, self.height, self.width) < 1:
            raise ConfigurationError("frame dimensions must be positive")
        if self.num_stages < 2:
            raise ConfigurationError("num_stages must be at least 2")
        if self.noise_std < 0:
            raise ConfigurationError("noise_std must be non-negative")
        if not self.score_range[0] < self.score_range[1]:
            raise ConfigurationError("score_range must satisfy min < max")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ConfigurationError("test_fraction must lie in [0, 1)")
        windows = self.resolved_windows()
        if len(windows) != self.num_stages - 1:
            raise ConfigurationError(
                f"need {self.num_stages - 1} transition windows, got {len(windows)}"
            )
        prev_hi = None
        for lo, hi in windows:
            if not lo < hi:
                raise ConfigurationError(f"empty transition window ({lo}, {hi})")
            if prev_hi is not None and lo < prev_hi:
                raise ConfigurationError("transition windows must be ordered and disjoint")
            prev_hi = hi
        # Worst-case stage lengths: earliest next transition minus latest previous one.
        if windows[0][0] < MIN_STAGE_FRAMES:
            raise ConfigurationError("first stage can be shorter than the minimum stage length")
        for (_, hi_prev), (lo_next, _) in zip(windows, windows[1:]):
            if lo_next - (hi_prev - 1) < MIN_STAGE_FRAMES:
                raise ConfigurationError("interior stage can be shorter than the minimum stage length")
        if self.num_frames - (windows[-1][1] - 1) < MIN_STAGE_FRAMES:
            raise ConfigurationError("last stage can be shorter than the minimum stage length")
