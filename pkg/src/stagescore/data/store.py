"""On-disk dataset format: a JSON manifest plus one raw binary file per video.

Manifest (UTF-8 JSON): format_version, num_stages, score_range, frame_shape
([C, H, W]), split ({train, test} id lists) and a ``videos`` list with
id, class_code, score, num_frames, stage_labels and the relative binary path.
Binary payload: float32, little-endian, row-major [L, C, H, W], no header —
the shape comes from the manifest.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DataFormatError, ShapeMismatchError
from .types import AnnotatedVideo, Dataset, Split, transition_labels_from_stage_labels

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"
_PAYLOAD_DTYPE = np.dtype("<f4")

_REQUIRED_TOP = ("format_version", "num_stages", "score_range", "frame_shape", "split", "videos")
_REQUIRED_VIDEO = ("id", "class_code", "score", "num_frames", "stage_labels", "file")


def save_dataset(dataset: Dataset, path) -> None:
    """Write ``dataset`` under directory ``path`` (created if missing)."""
    root = Path(path)
    (root / "videos").mkdir(parents=True, exist_ok=True)
    frame_shape = list(dataset.videos[0].frames.shape[1:]) if dataset.videos else [0, 0, 0]

    entries = []
    for v in dataset.videos:
        rel = f"videos/{v.id}.bin"
        (root / rel).write_bytes(np.ascontiguousarray(v.frames, dtype=_PAYLOAD_DTYPE).tobytes())
        entries.append(
            {
                "id": v.id,
                "class_code": v.class_code,
                "score": v.score,
                "num_frames": v.num_frames,
                "stage_labels": [int(s) for s in v.stage_labels],
                "file": rel,
            }
        )

    manifest = {
        "format_version": FORMAT_VERSION,
        "num_stages": dataset.num_stages,
        "score_range": list(dataset.score_range),
        "frame_shape": frame_shape,
        "split": {"train": list(dataset.split.train), "test": list(dataset.split.test)},
        "videos": entries,
    }
    (root / MANIFEST_NAME).write_text(json.dumps(manifest, indent=1), encoding="utf-8")


def load_dataset(path) -> Dataset:
    """Load a dataset directory written by :func:`save_dataset`."""
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DataFormatError(f"no {MANIFEST_NAME} under {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"manifest is not valid JSON: {exc}") from exc

    for key in _REQUIRED_TOP:
        if key not in manifest:
            raise DataFormatError(f"manifest missing required field {key!r}")
    if manifest["format_version"] != FORMAT_VERSION:
        raise DataFormatError(f"unknown format_version {manifest['format_version']!r}")

    frame_shape = tuple(int(x) for x in manifest["frame_shape"])
    if len(frame_shape) != 3:
        raise DataFormatError("frame_shape must be [C, H, W]")

    videos = []
    for entry in manifest["videos"]:
        for key in _REQUIRED_VIDEO:
            if key not in entry:
                raise DataFormatError(f"video entry missing required field {key!r}")
        num_frames = int(entry["num_frames"])
        blob_path = root / entry["file"]
        if not blob_path.is_file():
            raise DataFormatError(f"missing binary payload {entry['file']!r}")
        raw = blob_path.read_bytes()
        expected = num_frames * int(np.prod(frame_shape)) * _PAYLOAD_DTYPE.itemsize
        if len(raw) != expected:
            raise ShapeMismatchError(
                f"video {entry['id']!r}: payload holds {len(raw)} bytes, "
                f"manifest shape implies {expected}"
            )
        frames = (
            np.frombuffer(raw, dtype=_PAYLOAD_DTYPE)
            .reshape((num_frames, *frame_shape))
            .astype(np.float32, copy=True)
        )
        stage_labels = np.asarray(entry["stage_labels"], dtype=np.int64)
        videos.append(
            AnnotatedVideo(
                id=entry["id"],
                frames=frames,
                class_code=entry["class_code"],
                score=float(entry["score"]),
                stage_labels=stage_labels,
                transition_labels=transition_labels_from_stage_labels(stage_labels),
            )
        )

    split = manifest["split"]
    return Dataset(
        videos=videos,
        score_range=tuple(float(x) for x in manifest["score_range"]),
        num_stages=int(manifest["num_stages"]),
        split=Split(train=tuple(split.get("train", ())), test=tuple(split.get("test", ()))),
    )
