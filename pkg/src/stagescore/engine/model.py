"""The assembled network: backbone, transition predictor, and scoring head."""

from __future__ import annotations

import torch.nn as nn

from ..backbone import Backbone, BackboneConfig
from ..nn_init import init_parameters
from ..scorer import DecoderConfig, ScoreRegressor, StageDifferenceDecoder
from ..segmenter import TransitionPredictor
from .config import TrainConfig


class ScoringHead(nn.Module):
    """Cross-attention decoder plus relative-score regressor."""

    def __init__(self, decoder: StageDifferenceDecoder, regressor: ScoreRegressor):
        super().__init__()
        self.decoder = decoder
        self.regressor = regressor


class StageScoreModel(nn.Module):
    """End-to-end model; submodule names define the checkpoint tensor names."""

    def __init__(self, config: TrainConfig):
        super().__init__()
        self.backbone = Backbone(
            BackboneConfig(
                in_channels=config.in_channels,
                widths=tuple(config.backbone_widths),
                gate_shift=tuple(config.backbone_gate_shift),
            )
        )
        dim = self.backbone.feature_dim
        self.segmenter = TransitionPredictor(dim, hidden_dim=config.gru_hidden)
        self.scorer = ScoringHead(
            StageDifferenceDecoder(
                DecoderConfig(
                    dim=dim,
                    seq_len=config.resample_size,
                    heads=config.decoder_heads,
                    blocks=config.decoder_blocks,
                    ffn_hidden=config.decoder_ffn_hidden,
                )
            ),
            ScoreRegressor(config.num_stages, dim, hidden=tuple(config.regressor_hidden)),
        )


def build_model(config: TrainConfig, seed: int | None = None) -> StageScoreModel:
    """Construct and deterministically initialize the full model."""
    return init_parameters(StageScoreModel(config), config.seed if seed is None else seed)
