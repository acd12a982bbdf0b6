"""Self-supervised objectives for temporally paired frames."""

from __future__ import annotations

import torch


def l2_normalize(x: torch.Tensor, eps: float = 1e-8) -> torch.Tensor:
    return x / x.norm(dim=-1, keepdim=True).clamp_min(eps)


def byol_time_loss(
    query: torch.Tensor,
    key: torch.Tensor,
    normalize: bool = True,
    eps: float = 1e-8,
) -> torch.Tensor:
    """Mean squared distance between normalized query and key projections.

    `query` comes from the online branch (through the predictor), `key`
    from the EMA target branch; the key is detached here so no gradient can
    reach the target network even if the caller forgets the no_grad block.
    With normalization the per-pair value is 2 - 2 cos(query, key), so the
    loss lives in [0, 4]: 0 for aligned pairs, 2 for orthogonal, 4 for
    antiparallel.
    """
    if query.shape != key.shape:
        raise ValueError(f"query/key shape mismatch: {tuple(query.shape)} vs {tuple(key.shape)}")
    key = key.detach()
    if normalize:
        query = l2_normalize(query, eps)
        key = l2_normalize(key, eps)
    return (query - key).pow(2).sum(dim=-1).mean()


def reconstruction_loss(recon: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Plain mean squared error over all pixels (AE/VAE objectives)."""
    if recon.shape != target.shape:
        raise ValueError(f"recon/target shape mismatch: {tuple(recon.shape)} vs {tuple(target.shape)}")
    return (recon - target).pow(2).mean()


def kl_divergence(mu: torch.Tensor, logvar: torch.Tensor) -> torch.Tensor:
    """KL(q(z|x) || N(0, I)), summed over latent dims, averaged over batch.

    Per element this is -0.5 * (1 + logvar - mu^2 - exp(logvar)); it is 0
    exactly when mu = 0 and logvar = 0.
    """
    per_item = -0.5 * (1.0 + logvar - mu.pow(2) - logvar.exp()).sum(dim=-1)
    return per_item.mean()
