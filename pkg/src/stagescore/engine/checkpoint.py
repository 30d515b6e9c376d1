"""Single-file named-tensor archive and the training checkpoint built on it.

Archive layout: an 8-byte magic, a little-endian uint64 header length, a UTF-8
JSON header, then the raw tensor payload. The header records free-form ``meta``
plus one entry per tensor (name, dtype, shape, offset, nbytes); payloads are
little-endian, row-major, offset-addressed. Tensor names follow the module
tree (``backbone.*``, ``segmenter.*``, ``scorer.*``) and are stable API.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..errors import CheckpointError, CheckpointIntegrityError, CheckpointVersionError
from .config import TrainConfig, config_from_dict
from .model import StageScoreModel, build_model

MAGIC = b"NTARCH01"
ARCHIVE_VERSION = 1

_DTYPES = {
    "float32": np.dtype("<f4"),
    "float64": np.dtype("<f8"),
    "int64": np.dtype("<i8"),
    "uint8": np.dtype("u1"),
}


def save_archive(path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    """Write named arrays plus JSON metadata to one file."""
    entries = []
    payload = bytearray()
    for name, array in tensors.items():
        dtype_name = array.dtype.name
        if dtype_name not in _DTYPES:
            raise CheckpointError(f"tensor {name!r} has unsupported dtype {dtype_name}")
        raw = np.ascontiguousarray(array, dtype=_DTYPES[dtype_name]).tobytes()
        entries.append(
            {
                "name": name,
                "dtype": dtype_name,
                "shape": list(array.shape),
                "offset": len(payload),
                "nbytes": len(raw),
            }
        )
        payload.extend(raw)
    header = json.dumps(
        {"format_version": ARCHIVE_VERSION, "meta": meta or {}, "tensors": entries}
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(payload)


def load_archive(path) -> tuple[dict[str, np.ndarray], dict]:
    """Read an archive back as (tensors, meta), verifying integrity."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 8 or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointIntegrityError("not a tensor archive (bad magic)")
    (header_len,) = struct.unpack("<Q", raw[len(MAGIC) : len(MAGIC) + 8])
    header_end = len(MAGIC) + 8 + header_len
    if len(raw) < header_end:
        raise CheckpointIntegrityError("archive truncated inside the header")
    try:
        header = json.loads(raw[len(MAGIC) + 8 : header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointIntegrityError(f"archive header unreadable: {exc}") from exc
    if header.get("format_version") != ARCHIVE_VERSION:
        raise CheckpointVersionError(
            f"unsupported archive format_version {header.get('format_version')!r}"
        )
    payload = raw[header_end:]
    tensors = {}
    for entry in header["tensors"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        if start + nbytes > len(payload):
            raise CheckpointIntegrityError(
                f"archive truncated: tensor {entry['name']!r} extends past end of file"
            )
        dtype = _DTYPES[entry["dtype"]]
        array = np.frombuffer(payload[start : start + nbytes], dtype=dtype)
        expected = int(np.prod(entry["shape"])) if entry["shape"] else 1
        if array.size != expected:
            raise CheckpointIntegrityError(
                f"tensor {entry['name']!r}: payload size disagrees with shape"
            )
        tensors[entry["name"]] = array.reshape(entry["shape"]).copy()
    return tensors, header["meta"]


@dataclass
class Checkpoint:
    """Model parameters plus everything needed to reproduce the run state."""

    config: TrainConfig
    step: int
    tensors: dict[str, np.ndarray]
    torch_rng: np.ndarray  # uint8 state vector
    numpy_rng: dict | None

    def restore_model(self) -> StageScoreModel:
        model = build_model(self.config)
        apply_tensors(model, self.tensors)
        return model


def make_checkpoint(
    model: StageScoreModel,
    config: TrainConfig,
    step: int,
    numpy_rng_state: dict | None = None,
) -> Checkpoint:
    tensors = {
        name: param.detach().cpu().numpy().copy() for name, param in model.named_parameters()
    }
    return Checkpoint(
        config=config,
        step=step,
        tensors=tensors,
        torch_rng=torch.get_rng_state().numpy().copy(),
        numpy_rng=numpy_rng_state,
    )


def save_checkpoint(path, checkpoint: Checkpoint) -> None:
    tensors = dict(checkpoint.tensors)
    tensors["__state__.torch_rng"] = checkpoint.torch_rng.astype(np.uint8)
    meta = {
        "kind": "checkpoint",
        "config": checkpoint.config.to_dict(),
        "step": checkpoint.step,
        "numpy_rng": checkpoint.numpy_rng,
    }
    save_archive(path, tensors, meta)


def load_checkpoint(path) -> Checkpoint:
    tensors, meta = load_archive(path)
    if meta.get("kind") != "checkpoint":
        raise CheckpointError("archive does not hold a training checkpoint")
    torch_rng = tensors.pop("__state__.torch_rng", None)
    if torch_rng is None:
        raise CheckpointError("checkpoint missing tensor '__state__.torch_rng'")
    return Checkpoint(
        config=config_from_dict(meta["config"]),
        step=int(meta["step"]),
        tensors=tensors,
        torch_rng=torch_rng,
        numpy_rng=meta.get("numpy_rng"),
    )


def apply_tensors(model: StageScoreModel, tensors: dict[str, np.ndarray]) -> None:
    """Copy named arrays into the model, verifying names and shapes."""
    params = dict(model.named_parameters())
    missing = sorted(set(params) - set(tensors))
    if missing:
        raise CheckpointError(f"checkpoint missing tensors: {missing}")
    unexpected = sorted(set(tensors) - set(params))
    if unexpected:
        raise CheckpointError(f"checkpoint holds unexpected tensors: {unexpected}")
    for name, param in params.items():
        source = tensors[name]
        if tuple(source.shape) != tuple(param.shape):
            raise CheckpointError(
                f"tensor {name!r}: checkpoint shape {tuple(source.shape)} "
                f"does not match model shape {tuple(param.shape)}"
            )
        with torch.no_grad():
            param.copy_(torch.from_numpy(np.ascontiguousarray(source)))
