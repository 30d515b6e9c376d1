"""Deterministic initialization shared by every trainable module.

Weights draw from a fan-in-scaled uniform distribution, biases start at zero,
normalization layers at identity. All draws come from one local generator so a
(module, seed) pair always yields the same parameters regardless of global RNG
state.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn


def _fill_uniform(param: torch.Tensor, fan_in: int, gen: torch.Generator) -> None:
    bound = 1.0 / math.sqrt(max(fan_in, 1))
    with torch.no_grad():
        fresh = torch.rand(param.shape, generator=gen, dtype=param.dtype)
        param.copy_((fresh * 2.0 - 1.0) * bound)


def init_parameters(module: nn.Module, seed: int) -> nn.Module:
    """Re-initialize every parameter of ``module`` deterministically."""
    gen = torch.Generator().manual_seed(seed)
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            fan_in = m.in_channels * m.kernel_size[0] * m.kernel_size[1]
            _fill_uniform(m.weight, fan_in, gen)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.Linear):
            _fill_uniform(m.weight, m.in_features, gen)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
        elif isinstance(m, nn.GRU):
            for name, param in m.named_parameters(recurse=False):
                if name.startswith("weight_ih"):
                    _fill_uniform(param, m.input_size, gen)
                elif name.startswith("weight_hh"):
                    _fill_uniform(param, m.hidden_size, gen)
                else:
                    nn.init.zeros_(param)
        elif isinstance(m, nn.GroupNorm):
            nn.init.ones_(m.weight)
            nn.init.zeros_(m.bias)
    return module


def count_parameters(module: nn.Module) -> int:
    """Total element count over all named parameter tensors."""
    return sum(p.numel() for p in module.parameters())
