"""Training-pair and exemplar sampling from the train split."""

from __future__ import annotations

import numpy as np

from ..errors import ExemplarUnavailableError, SamplingError
from .types import AnnotatedVideo, Dataset, PairSample


def _train_ids_by_class(dataset: Dataset) -> dict[str, list[str]]:
    by_class: dict[str, list[str]] = {}
    for vid in dataset.split.train:
        by_class.setdefault(dataset.video(vid).class_code, []).append(vid)
    return by_class


def sample_training_pair(dataset: Dataset, rng: np.random.Generator) -> PairSample:
    """Uniform draw over all ordered same-class, distinct-id train pairs."""
    by_class = _train_ids_by_class(dataset)
    eligible = [(code, ids) for code, ids in sorted(by_class.items()) if len(ids) >= 2]
    if not eligible:
        raise SamplingError("no class has at least two train videos")
    counts = np.array([len(ids) * (len(ids) - 1) for _, ids in eligible], dtype=np.float64)
    code, ids = eligible[rng.choice(len(eligible), p=counts / counts.sum())]
    n = len(ids)
    flat = int(rng.integers(n * (n - 1)))
    q, r = divmod(flat, n - 1)
    e = r if r < q else r + 1
    return PairSample(query=dataset.video(ids[q]), exemplar=dataset.video(ids[e]))


def select_exemplars(
    dataset: Dataset,
    class_code: str,
    num_exemplars: int,
    rng: np.random.Generator,
) -> list[AnnotatedVideo]:
    """Up to ``num_exemplars`` distinct train videos of ``class_code``."""
    candidates = dataset.train_videos_of_class(class_code)
    if not candidates:
        raise ExemplarUnavailableError(f"no train videos of class {class_code!r}")
    take = min(num_exemplars, len(candidates))
    picked = rng.choice(len(candidates), size=take, replace=False)
    return [candidates[int(i)] for i in picked]
