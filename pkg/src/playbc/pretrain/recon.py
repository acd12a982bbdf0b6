"""Autoencoder and variational autoencoder pretraining baselines.

These share the play-data sampler and augmentation pipeline with the
time-contrastive loop but train a per-frame reconstruction objective. Only
the conv trunk is exported: the decoder exists to shape the representation,
not to be transferred.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path

import numpy as np
import torch

from playbc.datasets import PlayDataset
from playbc.models import (
    AutoencoderConfig,
    CheckpointMeta,
    WeightBundle,
    build_reconstructor,
    bundle_from_module,
    save_checkpoint,
    transfer_pretrained_weights,
)
from playbc.models.configs import CONV5_STACK
from playbc.pretrain.batches import FrameSampler, assemble_frame_batch
from playbc.pretrain.byol import PretrainConfig, TrainingLog, make_optimizer
from playbc.pretrain.losses import kl_divergence, reconstruction_loss
from playbc.seeding import derive_step_seed

log = logging.getLogger(__name__)


def _pretrain_recon(
    dataset: PlayDataset,
    cfg: PretrainConfig,
    variational: bool,
    out_path: str | Path | None,
    init_bundle: WeightBundle | None = None,
) -> tuple[WeightBundle, TrainingLog]:
    ae_cfg = AutoencoderConfig(
        conv_specs=CONV5_STACK[: cfg.depth],
        input_size=cfg.input_size,
        variational=variational,
    )
    net = build_reconstructor(ae_cfg, seed=cfg.seed)
    init_from = "none"
    if init_bundle is not None:
        summary = transfer_pretrained_weights(init_bundle, net, depth=cfg.depth, allow_missing=False)
        init_from = init_bundle.meta.pretrain_mode
        log.info("initialized reconstruction trunk from %s weights: %s", init_from, summary)
    sampler = FrameSampler(dataset)
    opt = make_optimizer(net.parameters(), cfg)
    tlog = TrainingLog(config=cfg.to_dict())
    eps_gen = torch.Generator().manual_seed(derive_step_seed(cfg.seed, 0, label="vae-eps"))
    branch = "vae" if variational else "ae"

    for step in range(cfg.steps):
        t0 = time.perf_counter()
        step_seed = derive_step_seed(cfg.seed, step)
        rng = np.random.default_rng(step_seed)
        items = sampler.sample(rng, cfg.batch_size)
        x = assemble_frame_batch(items, cfg.augment, step_seed, branch, workers=cfg.workers)

        if variational:
            mu, logvar = net(x)
            eps = torch.randn(mu.shape, generator=eps_gen)
            z = mu + torch.exp(0.5 * logvar) * eps
            loss = reconstruction_loss(net.decode(z), x) + cfg.beta * kl_divergence(mu, logvar)
        else:
            loss = reconstruction_loss(net.decode(net(x)), x)

        opt.zero_grad()
        loss.backward()
        opt.step()
        tlog.append(loss.item(), time.perf_counter() - t0)
        if cfg.log_every and step % cfg.log_every == 0:
            log.info("%s step %d/%d loss %.4f", branch, step, cfg.steps, loss.item())

    meta = CheckpointMeta(
        pretrain_mode=branch,
        steps=cfg.steps,
        source_dataset=dataset.manifest.dataset_id,
        pretrain_depth=cfg.depth,
        seed=cfg.seed,
        init_from=init_from,
    )
    bundle = bundle_from_module(net, meta, prefixes=("conv",), config_echo=cfg.to_dict())
    if out_path is not None:
        save_checkpoint(bundle, out_path)
    return bundle, tlog


def pretrain_autoencoder(
    dataset: PlayDataset,
    cfg: PretrainConfig,
    out_path: str | Path | None = None,
    init_bundle: WeightBundle | None = None,
) -> tuple[WeightBundle, TrainingLog]:
    """Train the deterministic autoencoder baseline; exports conv trunk only."""
    return _pretrain_recon(dataset, cfg, variational=False, out_path=out_path, init_bundle=init_bundle)


def pretrain_vae(
    dataset: PlayDataset,
    cfg: PretrainConfig,
    out_path: str | Path | None = None,
    init_bundle: WeightBundle | None = None,
) -> tuple[WeightBundle, TrainingLog]:
    """Train the VAE baseline (KL weight cfg.beta); exports conv trunk only."""
    return _pretrain_recon(dataset, cfg, variational=True, out_path=out_path, init_bundle=init_bundle)
