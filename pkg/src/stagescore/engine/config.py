"""Training configuration and YAML config-file handling."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml

from ..errors import ConfigurationError

_TUPLE_FIELDS = {"adam_betas", "backbone_widths", "backbone_gate_shift", "regressor_hidden"}


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    epochs: int = 50
    batch_size: int = 8
    seed: int = 0
    frames: int = 96
    num_stages: int = 3
    resample_size: int = 16
    tau: float = 0.5
    num_exemplars: int = 10
    min_gap: int = 4
    teacher_forcing: bool = True
    weight_aqa: float = 1.0
    weight_ce: float = 1.0
    weight_cont: float = 1.0
    balanced_transition_loss: bool = True
    grad_clip: float | None = None
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    in_channels: int = 3
    backbone_widths: tuple[int, ...] = (32, 64, 96, 128)
    backbone_gate_shift: tuple[bool, ...] = (True, True, True, True)
    gru_hidden: int = 64
    decoder_blocks: int = 2
    decoder_heads: int = 4
    decoder_ffn_hidden: int | None = None
    regressor_hidden: tuple[int, int] = (128, 64)

    def __post_init__(self):
        positives = {
            "lr": self.lr,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "frames": self.frames,
            "resample_size": self.resample_size,
            "tau": self.tau,
            "num_exemplars": self.num_exemplars,
            "min_gap": self.min_gap,
            "gru_hidden": self.gru_hidden,
            "decoder_blocks": self.decoder_blocks,
            "decoder_heads": self.decoder_heads,
            "in_channels": self.in_channels,
            "adam_eps": self.adam_eps,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        if self.num_stages < 2:
            raise ConfigurationError("num_stages must be at least 2")
        if self.frames < self.num_stages * self.min_gap:
            raise ConfigurationError(
                f"frames={self.frames} cannot host {self.num_stages} stages of {self.min_gap}"
            )
        if self.grad_clip is not None and self.grad_clip <= 0:
            raise ConfigurationError("grad_clip must be positive when set")
        if len(self.backbone_widths) != len(self.backbone_gate_shift):
            raise ConfigurationError("backbone widths and gate flags must align")
        if self.feature_dim % self.decoder_heads:
            raise ConfigurationError(
                f"feature dim {self.feature_dim} not divisible by decoder_heads"
            )
        if min(self.weight_aqa, self.weight_ce, self.weight_cont) < 0:
            raise ConfigurationError("loss weights must be non-negative")

    @property
    def feature_dim(self) -> int:
        return self.backbone_widths[-1]

    def to_dict(self) -> dict:
        payload = asdict(self)
        for key in _TUPLE_FIELDS:
            payload[key] = list(payload[key])
        return payload


def config_from_dict(payload: dict) -> TrainConfig:
    if not isinstance(payload, dict):
        raise ConfigurationError("config must be a mapping of field names to values")
    known = {f.name for f in fields(TrainConfig)}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {unknown}")
    coerced = dict(payload)
    for key in _TUPLE_FIELDS & set(coerced):
        coerced[key] = tuple(coerced[key])
    return TrainConfig(**coerced)


def load_train_config(path) -> TrainConfig:
    """Parse a YAML file holding TrainConfig fields; unknown keys are rejected."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config file is not valid YAML: {exc}") from exc
    if payload is None:
        payload = {}
    return config_from_dict(payload)
