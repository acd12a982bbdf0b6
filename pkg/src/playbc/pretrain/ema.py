"""Exponential-moving-average target updates.

The update rule is target' = tau * target + (1 - tau) * online, applied
element-wise to every parameter. Two forms are provided: a pure numpy
function over named arrays (exactly testable in float64) and an in-place
torch variant used inside the training loop. Both use the identical
two-product arithmetic so their results agree bit-for-bit at equal dtype.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np
import torch


def _check_tau(tau: float) -> None:
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")


def ema_update(
    target: Mapping[str, np.ndarray],
    online: Mapping[str, np.ndarray],
    tau: float,
) -> dict[str, np.ndarray]:
    """Pure functional EMA step over named arrays; dtype is preserved."""
    _check_tau(tau)
    if set(target.keys()) != set(online.keys()):
        raise ValueError(
            f"target/online key mismatch: only-target={sorted(set(target) - set(online))[:3]}, "
            f"only-online={sorted(set(online) - set(target))[:3]}"
        )
    out = {}
    for k in target:
        t, o = np.asarray(target[k]), np.asarray(online[k])
        if t.shape != o.shape:
            raise ValueError(f"shape mismatch for {k!r}: {t.shape} vs {o.shape}")
        out[k] = tau * t + (1.0 - tau) * o
    return out


@torch.no_grad()
def ema_update_module_(target: torch.nn.Module, online: torch.nn.Module, tau: float) -> None:
    """In-place EMA of every floating tensor in the target's state dict.

    Non-floating buffers (counters etc.) are copied from the online module.
    """
    _check_tau(tau)
    tgt, src = target.state_dict(), online.state_dict()
    if tgt.keys() != src.keys():
        raise ValueError("target and online modules have different state-dict keys")
    for k, t in tgt.items():
        o = src[k]
        if t.is_floating_point():
            t.mul_(tau).add_(o, alpha=1.0 - tau)
        else:
            t.copy_(o)


def tau_for_step(tau_base: float, step: int, total_steps: int, schedule: str) -> float:
    """Per-step tau: constant, or the cosine ramp tau -> 1 over the run."""
    _check_tau(tau_base)
    if schedule == "constant":
        return tau_base
    if schedule == "cosine":
        if not (0 <= step < total_steps):
            raise ValueError(f"step {step} outside [0, {total_steps})")
        return 1.0 - (1.0 - tau_base) * (math.cos(math.pi * step / total_steps) + 1.0) / 2.0
    raise ValueError(f"unknown tau schedule {schedule!r}")
