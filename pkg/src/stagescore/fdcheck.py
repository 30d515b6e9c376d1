"""Central finite-difference gradient checking.

Used by the test suite to verify autograd gradients against an independent
numeric estimate. Run at float64: the central-difference truncation error is
O(eps^2), so with the default step the numeric gradient carries ~1e-9 relative
noise, far below the tolerances asserted by the tests.
"""

from __future__ import annotations

import torch

DEFAULT_EPS = 1e-5


def numeric_gradient(fn, tensor: torch.Tensor, eps: float = DEFAULT_EPS) -> torch.Tensor:
    """Central-difference gradient of scalar ``fn()`` w.r.t. ``tensor``.

    ``tensor`` is perturbed in place element by element and restored; ``fn``
    must re-evaluate the full forward pass on every call.
    """
    grad = torch.zeros_like(tensor, dtype=torch.float64)
    flat = tensor.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.numel()):
        orig = flat[i].item()
        with torch.no_grad():
            flat[i] = orig + eps
            hi = float(fn())
            flat[i] = orig - eps
            lo = float(fn())
            flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def max_relative_gradient_error(fn, tensors, eps: float = DEFAULT_EPS) -> float:
    """Worst per-tensor relative error between autograd and central differences.

    ``tensors`` are the leaves (inputs and/or parameters, requires_grad=True)
    of the scalar expression built by ``fn``. The per-tensor error is
    max|g_auto - g_num| / max(max|g_auto|, max|g_num|, 1e-12).
    """
    tensors = list(tensors)
    loss = fn()
    analytic = torch.autograd.grad(loss, tensors)
    worst = 0.0
    for t, ga in zip(tensors, analytic):
        gn = numeric_gradient(fn, t, eps)
        ga = ga.to(torch.float64)
        scale = max(ga.abs().max().item(), gn.abs().max().item(), 1e-12)
        worst = max(worst, (ga - gn).abs().max().item() / scale)
    return worst
