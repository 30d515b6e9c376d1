"""Relative-score head: cross-attention stage-difference decoding, MLP
regression, score composition, and the regression loss.

The query video's stage sequence attends over the exemplar's matching stage
sequence; the pooled block output is a per-stage difference embedding. The
regressor maps the concatenated embeddings to a relative score, which is added
to the exemplar's known score to predict the query's score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigurationError, ShapeMismatchError


@dataclass(frozen=True)
class DecoderConfig:
    dim: int
    seq_len: int
    heads: int = 4
    blocks: int = 2
    ffn_hidden: int | None = None

    def __post_init__(self):
        if min(self.dim, self.seq_len, self.heads, self.blocks) < 1:
            raise ConfigurationError("decoder dimensions must be positive")
        if self.dim % self.heads:
            raise ConfigurationError(f"dim {self.dim} not divisible by heads {self.heads}")
        if self.ffn_hidden is not None and self.ffn_hidden < 1:
            raise ConfigurationError("ffn_hidden must be positive")

    @property
    def resolved_ffn_hidden(self) -> int:
        return self.ffn_hidden if self.ffn_hidden is not None else 2 * self.dim


class CrossAttentionBlock(nn.Module):
    """Multi-head cross-attention with residual add and a residual MLP."""

    def __init__(self, dim: int, heads: int, ffn_hidden: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.q_proj = nn.Linear(dim, dim)
        self.k_proj = nn.Linear(dim, dim)
        self.v_proj = nn.Linear(dim, dim)
        self.out_proj = nn.Linear(dim, dim)
        self.ffn = nn.Sequential(
            nn.Linear(dim, ffn_hidden), nn.GELU(), nn.Linear(ffn_hidden, dim)
        )

    def _split(self, x):  # [M, D] -> [h, M, d_h]
        return x.view(x.shape[0], self.heads, self.head_dim).transpose(0, 1)

    def forward(self, query_seq, context_seq):
        out, _ = self.forward_with_attention(query_seq, context_seq)
        return out

    def forward_with_attention(self, query_seq, context_seq):
        q = self._split(self.q_proj(query_seq))
        k = self._split(self.k_proj(context_seq))
        v = self._split(self.v_proj(context_seq))
        attn = F.softmax(q @ k.transpose(-2, -1) / math.sqrt(self.head_dim), dim=-1)
        ctx = (attn @ v).transpose(0, 1).reshape(query_seq.shape)
        x = query_seq + self.out_proj(ctx)
        x = x + self.ffn(x)
        return x, attn  # attn: [h, M, M]


class StageDifferenceDecoder(nn.Module):
    """Stack of cross-attention blocks pooled to one difference vector."""

    def __init__(self, config: DecoderConfig):
        super().__init__()
        self.config = config
        self.pos_embedding = nn.Parameter(torch.zeros(config.seq_len, config.dim))
        self.blocks = nn.ModuleList(
            CrossAttentionBlock(config.dim, config.heads, config.resolved_ffn_hidden)
            for _ in range(config.blocks)
        )

    def _check(self, seq):
        expected = (self.config.seq_len, self.config.dim)
        if tuple(seq.shape) != expected:
            raise ShapeMismatchError(f"expected stage sequence {expected}, got {tuple(seq.shape)}")

    def forward(self, query_seq: torch.Tensor, context_seq: torch.Tensor) -> torch.Tensor:
        """Two [M, D] stage sequences -> one [D] difference embedding."""
        out, _ = self.forward_with_attention(query_seq, context_seq)
        return out

    def forward_with_attention(self, query_seq, context_seq):
        self._check(query_seq)
        self._check(context_seq)
        pos = self.pos_embedding.to(query_seq.dtype)
        x = query_seq + pos
        context = context_seq + pos
        attentions = []
        for block in self.blocks:
            x, attn = block.forward_with_attention(x, context)
            attentions.append(attn)
        return x.mean(dim=0), attentions


def decode_stage_difference(f_q_stage, f_e_stage, decoder: StageDifferenceDecoder):
    """Difference embedding [D] for one aligned stage pair."""
    return decoder(f_q_stage, f_e_stage)


class ScoreRegressor(nn.Module):
    """MLP from concatenated stage difference embeddings to a relative score."""

    def __init__(self, num_stages: int, dim: int, hidden: tuple[int, int] = (128, 64)):
        super().__init__()
        if num_stages < 1 or dim < 1 or min(hidden) < 1:
            raise ConfigurationError("regressor dimensions must be positive")
        self.num_stages = num_stages
        self.dim = dim
        self.net = nn.Sequential(
            nn.Linear(num_stages * dim, hidden[0]),
            nn.GELU(),
            nn.Linear(hidden[0], hidden[1]),
            nn.GELU(),
            nn.Linear(hidden[1], 1),
        )

    def forward(self, relative_features: torch.Tensor) -> torch.Tensor:
        """[K_s, D] stage difference embeddings -> scalar relative score."""
        expected = (self.num_stages, self.dim)
        if tuple(relative_features.shape) != expected:
            raise ShapeMismatchError(
                f"expected relative features {expected}, got {tuple(relative_features.shape)}"
            )
        return self.net(relative_features.reshape(-1)).squeeze(-1)


def regress_relative_score(relative_features, regressor: ScoreRegressor):
    return regressor(relative_features)


@dataclass(frozen=True)
class ScorePrediction:
    """A relative score anchored on an exemplar's known score."""

    s_rel: float
    s_hat: float
    exemplar_score: float


def predict_score(exemplar_score: float, s_rel: float) -> ScorePrediction:
    """Compose the predicted score: exemplar score plus relative score."""
    return ScorePrediction(
        s_rel=s_rel, s_hat=exemplar_score + s_rel, exemplar_score=exemplar_score
    )


def aqa_loss(true_scores, predicted_scores) -> torch.Tensor:
    """Mean squared error between true and predicted quality scores."""
    t = true_scores if torch.is_tensor(true_scores) else torch.as_tensor(true_scores, dtype=torch.float32)
    p = predicted_scores if torch.is_tensor(predicted_scores) else torch.as_tensor(predicted_scores, dtype=torch.float32)
    if t.numel() == 0:
        raise ConfigurationError("score batch must be non-empty")
    if t.shape != p.shape:
        raise ShapeMismatchError(f"score shapes differ: {tuple(t.shape)} vs {tuple(p.shape)}")
    return ((t - p) ** 2).mean()
