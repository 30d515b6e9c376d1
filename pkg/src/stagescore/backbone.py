"""Per-frame 2D convolutional feature extractor with gated temporal shifts.

Frames pass through a stack of stride-2 conv stages; a gate-shift module
inside each flagged stage exchanges gated channel content between neighboring
frames, which is the only place temporal information enters. Global average
pooling turns the final maps into one feature vector per frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigurationError, ShapeMismatchError
from .nn_init import init_parameters


@dataclass(frozen=True)
class BackboneConfig:
    in_channels: int = 3
    widths: tuple[int, ...] = (32, 64, 96, 128)
    gate_shift: tuple[bool, ...] = (True, True, True, True)

    def __post_init__(self):
        if self.in_channels < 1:
            raise ConfigurationError("in_channels must be positive")
        if not self.widths or any(w < 1 for w in self.widths):
            raise ConfigurationError("stage widths must be positive")
        if len(self.gate_shift) != len(self.widths):
            raise ConfigurationError("need one gate_shift flag per stage")
        for w, gated in zip(self.widths, self.gate_shift):
            if gated and w % 2:
                raise ConfigurationError(f"gated stage width {w} must be even")

    @property
    def feature_dim(self) -> int:
        return self.widths[-1]


def temporal_shift_halves(y: torch.Tensor) -> torch.Tensor:
    """Shift the first channel half one frame forward in time, the second half
    one frame back; content pushed past either end is dropped and the vacated
    frames are zero."""
    half = y.shape[1] // 2
    out = torch.zeros_like(y)
    out[1:, :half] = y[:-1, :half]
    out[:-1, half:] = y[1:, half:]
    return out


def gate_shift(x: torch.Tensor, gate_conv: nn.Conv2d) -> torch.Tensor:
    """Gated temporal shift of a frame-major feature tensor [L, C, H, W].

    g = tanh(gate_conv(x)) selects per-position content y = g * x; the ungated
    remainder x - y passes through untouched while y is split into channel
    halves and shifted one frame forward/backward with zero padding.
    """
    if x.dim() != 4:
        raise ShapeMismatchError(f"expected [L, C, H, W] input, got shape {tuple(x.shape)}")
    if x.shape[0] < 1:
        raise ConfigurationError("gate_shift needs at least one frame")
    if x.shape[1] % 2:
        raise ConfigurationError("gate_shift needs an even channel count")
    g = torch.tanh(gate_conv(x))
    y = g * x
    return (x - y) + temporal_shift_halves(y)


class GateShift(nn.Module):
    """Learned spatial gate feeding :func:`gate_shift`."""

    def __init__(self, channels: int):
        super().__init__()
        if channels % 2:
            raise ConfigurationError("GateShift channel count must be even")
        self.gate_conv = nn.Conv2d(channels, channels, kernel_size=3, padding=1)

    def forward(self, x):
        return gate_shift(x, self.gate_conv)


def _norm_groups(width: int) -> int:
    for g in (8, 4, 2):
        if width % g == 0:
            return g
    return 1


class _Stage(nn.Module):
    """Stride-2 downsampling stage, optionally temporal via a gate shift."""

    def __init__(self, in_channels, width, gated):
        super().__init__()
        self.conv_in = nn.Conv2d(in_channels, width, 3, stride=2, padding=1)
        self.norm_in = nn.GroupNorm(_norm_groups(width), width)
        self.gate = GateShift(width) if gated else None
        self.conv_out = nn.Conv2d(width, width, 3, stride=1, padding=1)
        self.norm_out = nn.GroupNorm(_norm_groups(width), width)

    def forward(self, x):
        x = F.gelu(self.norm_in(self.conv_in(x)))
        if self.gate is not None:
            x = self.gate(x)
        return F.gelu(self.norm_out(self.conv_out(x)))


class Backbone(nn.Module):
    """Frame-wise conv stack producing one feature vector per frame."""

    def __init__(self, config: BackboneConfig):
        super().__init__()
        self.config = config
        stages = []
        prev = config.in_channels
        for width, gated in zip(config.widths, config.gate_shift):
            stages.append(_Stage(prev, width, gated))
            prev = width
        self.stages = nn.ModuleList(stages)

    @property
    def feature_dim(self) -> int:
        return self.config.feature_dim

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        """[L, C, H, W] -> [L, D] via conv stages and spatial mean pooling."""
        if frames.dim() != 4:
            raise ShapeMismatchError(f"expected [L, C, H, W], got shape {tuple(frames.shape)}")
        if frames.shape[1] != self.config.in_channels:
            raise ShapeMismatchError(
                f"expected {self.config.in_channels} channels, got {frames.shape[1]}"
            )
        x = frames
        for stage in self.stages:
            x = stage(x)
        return x.mean(dim=(2, 3))


def init_backbone(config: BackboneConfig, seed: int) -> Backbone:
    """Build a backbone with deterministic fan-in-scaled uniform weights."""
    return init_parameters(Backbone(config), seed)


def extract_features(frames: torch.Tensor, backbone: Backbone) -> torch.Tensor:
    """Per-frame features [L, D] for one video."""
    return backbone(frames)
