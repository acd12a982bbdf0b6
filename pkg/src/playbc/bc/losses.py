"""Behavior-cloning loss on relative end-effector translations.

The objective combines a plain MSE with a direction term that penalizes the
angle between predicted and ground-truth actions:

    loss = MSE(pred, gt) + lambda_dir * mean_b(1 - cos(pred_b, gt_b))

The direction term is scale-invariant in both arguments, which keeps the
optimizer pointed at "move the right way" even when action magnitudes are
small. Ground-truth actions with near-zero norm carry no directional
information, so those rows contribute zero to the direction term rather
than an arbitrary angle against noise.
"""

from __future__ import annotations

import torch

from playbc.errors import ValidationError

ZERO_NORM_THRESHOLD = 1e-6


def direction_cosines(pred: torch.Tensor, target: torch.Tensor, eps: float = 1e-8) -> torch.Tensor:
    """Per-row cosine similarity with an eps-clamped denominator."""
    dot = (pred * target).sum(dim=-1)
    denom = (pred.norm(dim=-1) * target.norm(dim=-1)).clamp_min(eps)
    return dot / denom


def bc_loss(
    pred: torch.Tensor,
    target: torch.Tensor,
    lambda_dir: float = 1.0,
    eps: float = 1e-8,
    return_parts: bool = False,
):
    """Combined MSE + direction loss over a (B, 3) action batch."""
    if pred.shape != target.shape or pred.dim() != 2 or pred.shape[-1] != 3:
        raise ValidationError(
            f"expected matching (B, 3) batches, got {tuple(pred.shape)} and {tuple(target.shape)}"
        )
    if lambda_dir < 0:
        raise ValidationError(f"lambda_dir must be >= 0, got {lambda_dir}")
    if not torch.isfinite(pred).all():
        raise ValidationError("non-finite values in predicted actions")
    if not torch.isfinite(target).all():
        raise ValidationError("non-finite values in target actions")

    mse = (pred - target).pow(2).mean()
    cos = direction_cosines(pred, target, eps)
    informative = (target.norm(dim=-1) > ZERO_NORM_THRESHOLD).to(cos.dtype)
    direction = ((1.0 - cos) * informative).mean()
    total = mse + lambda_dir * direction
    if return_parts:
        return total, {"mse": float(mse.detach()), "direction": float(direction.detach())}
    return total
