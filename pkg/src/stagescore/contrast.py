"""Stage-wise contrastive objective over pooled stage features.

Same-stage features of a query/exemplar pair form the positive pair; the
negatives are the 2(K_s-1) cross-stage pairs, half against the other video
(inter-video) and half within the anchor's own video (intra-video). The loss
is the temperature-scaled softmax objective averaged symmetrically over both
anchoring directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .errors import ConfigurationError, ShapeMismatchError


@dataclass(frozen=True)
class ContrastConfig:
    tau: float = 0.5
    epsilon_norm: float = 1e-12

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigurationError("temperature tau must be positive")
        if self.epsilon_norm <= 0:
            raise ConfigurationError("epsilon_norm must be positive")


DEFAULT_CONTRAST = ContrastConfig()


def _normalize(v: torch.Tensor, eps: float) -> torch.Tensor:
    return v / v.norm().clamp(min=eps)


def stage_similarity(a: torch.Tensor, b: torch.Tensor, cfg: ContrastConfig = DEFAULT_CONTRAST):
    """Cosine similarity of two stage vectors; zero vectors map to 0."""
    if a.shape != b.shape or a.dim() != 1:
        raise ShapeMismatchError(f"expected matching 1-D vectors, got {tuple(a.shape)} vs {tuple(b.shape)}")
    return (_normalize(a, cfg.epsilon_norm) * _normalize(b, cfg.epsilon_norm)).sum()


def _pooled(features) -> torch.Tensor:
    pooled = getattr(features, "pooled", features)
    if not torch.is_tensor(pooled) or pooled.dim() != 2:
        raise ShapeMismatchError("expected a StageFeatureSet or a [K_s, D] tensor")
    return pooled


def _check_stage(pooled: torch.Tensor, stage: int) -> None:
    if not 0 <= stage < pooled.shape[0]:
        raise IndexError(f"stage {stage} out of range for {pooled.shape[0]} stages")


def positive_energy(f_q_pooled, f_e_pooled, stage: int, cfg: ContrastConfig = DEFAULT_CONTRAST):
    """exp(sim(f_q[stage], f_e[stage]) / tau)."""
    q, e = _pooled(f_q_pooled), _pooled(f_e_pooled)
    if q.shape != e.shape:
        raise ShapeMismatchError(f"stage feature shapes differ: {tuple(q.shape)} vs {tuple(e.shape)}")
    _check_stage(q, stage)
    return torch.exp(stage_similarity(q[stage], e[stage], cfg) / cfg.tau)


def negative_energy(f_q_pooled, f_e_pooled, stage: int, cfg: ContrastConfig = DEFAULT_CONTRAST):
    """Summed energies of the inter-video and intra-video cross-stage pairs."""
    q, e = _pooled(f_q_pooled), _pooled(f_e_pooled)
    if q.shape != e.shape:
        raise ShapeMismatchError(f"stage feature shapes differ: {tuple(q.shape)} vs {tuple(e.shape)}")
    num_stages = q.shape[0]
    if num_stages < 2:
        raise ConfigurationError("negatives need at least two stages")
    _check_stage(q, stage)
    total = q.new_zeros(())
    for j in range(num_stages):
        if j == stage:
            continue
        total = total + torch.exp(stage_similarity(q[stage], e[j], cfg) / cfg.tau)
        total = total + torch.exp(stage_similarity(q[stage], q[j], cfg) / cfg.tau)
    return total


def pairwise_objective(f_q_pooled, f_e_pooled, stage: int, cfg: ContrastConfig = DEFAULT_CONTRAST):
    """-log of the positive energy's share of the total pair energy."""
    pos = positive_energy(f_q_pooled, f_e_pooled, stage, cfg)
    neg = negative_energy(f_q_pooled, f_e_pooled, stage, cfg)
    return -torch.log(pos / (pos + neg))


def stage_contrastive_loss(f_q, f_e, cfg: ContrastConfig = DEFAULT_CONTRAST):
    """Symmetric average of the pairwise objectives over all stages.

    Accepts StageFeatureSets or raw pooled [K_s, D] tensors. Swapping the
    arguments reproduces the same value bitwise.
    """
    q, e = _pooled(f_q), _pooled(f_e)
    if q.shape != e.shape:
        raise ShapeMismatchError(f"stage feature shapes differ: {tuple(q.shape)} vs {tuple(e.shape)}")
    num_stages = q.shape[0]
    total = q.new_zeros(())
    for i in range(num_stages):
        # Pairs are summed before accumulating so that swapping the arguments
        # reproduces the identical float operation sequence.
        total = total + (pairwise_objective(q, e, i, cfg) + pairwise_objective(e, q, i, cfg))
    return total / (2 * num_stages)
