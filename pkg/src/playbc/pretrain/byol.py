"""Self-supervised pretraining on temporally offset frame pairs.

An online encoder (trunk -> projection -> predictor) chases an EMA target
encoder (trunk -> projection) across time: the query branch sees frame t,
the target branch frame t + offset, and the loss pulls their normalized
projections together. Gradients flow through the online branch only; the
target follows by exponential moving average.
"""

from __future__ import annotations

import copy
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from playbc.datasets import AugmentConfig, PlayDataset
from playbc.errors import ConfigError
from playbc.models import (
    CheckpointMeta,
    PlayEncoderConfig,
    WeightBundle,
    build_play_encoder,
    bundle_from_module,
    save_checkpoint,
    transfer_pretrained_weights,
)
from playbc.pretrain.batches import TemporalPairSampler, assemble_pair_batch
from playbc.pretrain.ema import ema_update_module_, tau_for_step
from playbc.pretrain.losses import byol_time_loss
from playbc.seeding import derive_step_seed

log = logging.getLogger(__name__)

OPTIMIZERS = ("adam", "sgd")
TAU_SCHEDULES = ("constant", "cosine")


@dataclass
class PretrainConfig:
    """Hyperparameters for one self-supervised pretraining run."""

    steps: int = 4500
    batch_size: int = 64
    offset: int = 3
    lr: float = 1e-3
    optimizer: str = "adam"
    tau: float = 0.996
    tau_schedule: str = "constant"
    normalize_projections: bool = True
    use_predictor: bool = True
    symmetrize: bool = False
    depth: int = 3
    seed: int = 0
    input_size: int = 224
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    beta: float = 1.0  # KL weight; only the variational objective reads it
    workers: int = 0
    log_every: int = 50

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.batch_size < 2:
            raise ConfigError(
                f"batch_size must be >= 2 (projection batch norm), got {self.batch_size}"
            )
        if self.offset < 1:
            raise ConfigError(f"offset must be >= 1, got {self.offset}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if not (0.0 <= self.tau <= 1.0):
            raise ConfigError(f"tau must lie in [0, 1], got {self.tau}")
        if self.tau_schedule not in TAU_SCHEDULES:
            raise ConfigError(f"tau_schedule must be one of {TAU_SCHEDULES}, got {self.tau_schedule!r}")
        if self.depth not in (3, 4, 5):
            raise ConfigError(f"depth must be 3, 4, or 5, got {self.depth}")
        if self.beta < 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if self.augment.output_size != self.input_size:
            self.augment = dataclasses.replace(self.augment, output_size=self.input_size)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class TrainingLog:
    """Per-step losses and timings for one run, CSV-serializable."""

    losses: list[float] = field(default_factory=list)
    step_seconds: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def append(self, loss: float, seconds: float) -> None:
        self.losses.append(float(loss))
        self.step_seconds.append(float(seconds))

    @property
    def n_steps(self) -> int:
        return len(self.losses)

    @property
    def final_loss(self) -> float:
        if not self.losses:
            raise ValueError("empty training log")
        return self.losses[-1]

    @property
    def total_seconds(self) -> float:
        return float(sum(self.step_seconds))

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        rows = ["step,loss,seconds"]
        rows += [f"{i},{l:.10g},{s:.6g}" for i, (l, s) in enumerate(zip(self.losses, self.step_seconds))]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        return path


def make_optimizer(params, cfg: PretrainConfig) -> torch.optim.Optimizer:
    if cfg.optimizer == "adam":
        return torch.optim.Adam(params, lr=cfg.lr)
    return torch.optim.SGD(params, lr=cfg.lr, momentum=0.9)


def pretrain_byol(
    dataset: PlayDataset,
    cfg: PretrainConfig,
    init_bundle: WeightBundle | None = None,
    out_path: str | Path | None = None,
    on_step: Callable[[int, torch.nn.Module, torch.nn.Module], None] | None = None,
) -> tuple[WeightBundle, TrainingLog]:
    """Run the time-contrastive pretraining loop and return trunk weights.

    With `init_bundle`, conv layers are seeded from an earlier checkpoint
    (e.g. externally trained classification weights) before self-supervised
    training starts; this is recorded as the bundle's `init_from`. The
    optional `on_step` hook receives (step, online, target) after each
    EMA update, for inspection during tests.
    """
    enc_cfg = PlayEncoderConfig.for_depth(cfg.depth, input_size=cfg.input_size, predictor=cfg.use_predictor)
    online = build_play_encoder(enc_cfg, seed=cfg.seed)
    init_from = "none"
    if init_bundle is not None:
        summary = transfer_pretrained_weights(init_bundle, online, depth=cfg.depth, allow_missing=False)
        init_from = init_bundle.meta.pretrain_mode
        log.info("initialized online trunk from %s weights: %s", init_from, summary)

    target = copy.deepcopy(online)
    target.requires_grad_(False)
    # eval mode: the EMA update is the *only* thing that ever changes target
    # state (batch-norm buffers included), which keeps the recursion exact.
    target.eval()

    sampler = TemporalPairSampler(dataset, offset=cfg.offset)
    opt = make_optimizer(online.parameters(), cfg)
    tlog = TrainingLog(config=cfg.to_dict())

    for step in range(cfg.steps):
        t0 = time.perf_counter()
        step_seed = derive_step_seed(cfg.seed, step)
        rng = np.random.default_rng(step_seed)
        pairs = sampler.sample(rng, cfg.batch_size)
        xq, xk = assemble_pair_batch(pairs, cfg.augment, step_seed, workers=cfg.workers)

        def online_out(x: torch.Tensor) -> torch.Tensor:
            z = online(x)
            return online.predict(z) if cfg.use_predictor else z

        q = online_out(xq)
        with torch.no_grad():
            k = target(xk)
        loss = byol_time_loss(q, k, normalize=cfg.normalize_projections)
        if cfg.symmetrize:
            q2 = online_out(xk)
            with torch.no_grad():
                k2 = target(xq)
            loss = 0.5 * (loss + byol_time_loss(q2, k2, normalize=cfg.normalize_projections))

        opt.zero_grad()
        loss.backward()
        opt.step()
        ema_update_module_(target, online, tau_for_step(cfg.tau, step, cfg.steps, cfg.tau_schedule))

        tlog.append(loss.item(), time.perf_counter() - t0)
        if on_step is not None:
            on_step(step, online, target)
        if cfg.log_every and step % cfg.log_every == 0:
            log.info("pretrain step %d/%d loss %.4f", step, cfg.steps, loss.item())

    prefixes = ("conv", "proj", "pred") if cfg.use_predictor else ("conv", "proj")
    meta = CheckpointMeta(
        pretrain_mode="byol_time",
        steps=cfg.steps,
        source_dataset=dataset.manifest.dataset_id,
        pretrain_depth=cfg.depth,
        seed=cfg.seed,
        init_from=init_from,
    )
    bundle = bundle_from_module(online, meta, prefixes=prefixes, config_echo=cfg.to_dict())
    if out_path is not None:
        save_checkpoint(bundle, out_path)
        log.info("saved pretraining checkpoint to %s", out_path)
    return bundle, tlog
