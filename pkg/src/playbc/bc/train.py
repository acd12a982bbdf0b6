"""Behavior cloning on expert demonstrations, with pluggable initialization.

The policy trunk can start from scratch or from any pretraining artifact:
self-supervised play weights, AE/VAE baselines, externally trained
classification weights, each optionally with classification-seeded
pretraining, or the trunk of a policy trained on a different task. The
trainer validates that the supplied checkpoint actually matches the
requested mode before touching any weights.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from playbc.datasets import AugmentConfig, DemoDataset, Trajectory
from playbc.errors import ConfigError, TransferError
from playbc.models import (
    CheckpointMeta,
    PolicyConfig,
    WeightBundle,
    build_policy,
    bundle_from_module,
    save_checkpoint,
    transfer_pretrained_weights,
)
from playbc.bc.losses import bc_loss
from playbc.pretrain.batches import assemble_frame_batch
from playbc.pretrain.byol import TrainingLog, make_optimizer
from playbc.seeding import derive_step_seed

log = logging.getLogger(__name__)


class InitMode(str, Enum):
    """The nine ways to initialize the policy trunk before cloning."""

    SCRATCH = "scratch"
    CLASSIFICATION = "classification"
    PLAY = "play"
    PLAY_CLASSIFICATION = "play_classification"
    AE = "ae"
    AE_CLASSIFICATION = "ae_classification"
    VAE = "vae"
    VAE_CLASSIFICATION = "vae_classification"
    OTHER_TASK = "other_task"


# mode -> (required checkpoint pretrain_mode, required init_from or None for any)
_EXPECTED_CHECKPOINT = {
    InitMode.CLASSIFICATION: ("classification", None),
    InitMode.PLAY: ("byol_time", "none"),
    InitMode.PLAY_CLASSIFICATION: ("byol_time", "classification"),
    InitMode.AE: ("ae", "none"),
    InitMode.AE_CLASSIFICATION: ("ae", "classification"),
    InitMode.VAE: ("vae", "none"),
    InitMode.VAE_CLASSIFICATION: ("vae", "classification"),
    InitMode.OTHER_TASK: ("bc", None),
}


@dataclass
class BCConfig:
    """Hyperparameters for one behavior-cloning run."""

    steps: int = 1000
    batch_size: int = 64
    lr: float = 3e-4
    lambda_dir: float = 1.0
    optimizer: str = "adam"
    init_mode: InitMode = InitMode.SCRATCH
    depth: int = 3
    task: str = "push"
    seed: int = 0
    input_size: int = 224
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    workers: int = 0
    log_every: int = 50

    def __post_init__(self):
        self.init_mode = InitMode(self.init_mode)
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.lambda_dir < 0:
            raise ConfigError(f"lambda_dir must be >= 0, got {self.lambda_dir}")
        if self.depth not in (3, 4, 5):
            raise ConfigError(f"depth must be 3, 4, or 5, got {self.depth}")
        if not self.task:
            raise ConfigError("task tag must be non-empty")
        if self.augment.output_size != self.input_size:
            self.augment = dataclasses.replace(self.augment, output_size=self.input_size)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["init_mode"] = self.init_mode.value
        return d


class TransitionSampler:
    """Uniform with-replacement sampler over labeled (frame, action) pairs."""

    def __init__(self, demos: DemoDataset):
        self._pool: list[tuple[Trajectory, int]] = [
            (traj, t) for traj in demos for t in range(traj.n_frames - 1)
        ]
        if not self._pool:
            raise ConfigError("demo dataset has no transitions")

    def __len__(self) -> int:
        return len(self._pool)

    def sample(self, rng: np.random.Generator, n: int) -> list[tuple[Trajectory, int]]:
        idx = rng.integers(0, len(self._pool), size=n)
        return [self._pool[i] for i in idx]


def validate_init_bundle(cfg: BCConfig, bundle: WeightBundle | None) -> None:
    """Check that the checkpoint's provenance matches the requested mode."""
    if cfg.init_mode is InitMode.SCRATCH:
        if bundle is not None:
            raise TransferError("init_mode=scratch takes no checkpoint")
        return
    if bundle is None:
        raise TransferError(f"init_mode={cfg.init_mode.value} requires a checkpoint")
    want_mode, want_init = _EXPECTED_CHECKPOINT[cfg.init_mode]
    if bundle.meta.pretrain_mode != want_mode:
        raise TransferError(
            f"init_mode={cfg.init_mode.value} needs a {want_mode!r} checkpoint, "
            f"got pretrain_mode={bundle.meta.pretrain_mode!r}"
        )
    if want_init is not None and bundle.meta.init_from != want_init:
        raise TransferError(
            f"init_mode={cfg.init_mode.value} needs a checkpoint with "
            f"init_from={want_init!r}, got {bundle.meta.init_from!r}"
        )
    if cfg.init_mode is InitMode.OTHER_TASK:
        src_task = bundle.config_echo.get("task")
        if src_task == cfg.task:
            raise TransferError(
                f"init_mode=other_task requires a policy trained on a different "
                f"task; checkpoint task is also {src_task!r}"
            )


def _transfer_depth(cfg: BCConfig) -> int:
    if cfg.init_mode in (InitMode.CLASSIFICATION, InitMode.OTHER_TASK):
        return 5
    return cfg.depth


def initialize_policy(cfg: BCConfig, init_bundle: WeightBundle | None):
    """Build the policy and apply the mode's weight transfer; returns both."""
    validate_init_bundle(cfg, init_bundle)
    policy = build_policy(PolicyConfig(input_size=cfg.input_size), seed=cfg.seed)
    summary = None
    if init_bundle is not None:
        allow_missing = cfg.init_mode is InitMode.CLASSIFICATION
        summary = transfer_pretrained_weights(
            init_bundle, policy, depth=_transfer_depth(cfg), allow_missing=allow_missing
        )
        log.info("init_mode=%s: %s", cfg.init_mode.value, summary)
    return policy, summary


def train_bc(
    demos: DemoDataset,
    cfg: BCConfig,
    init_bundle: WeightBundle | None = None,
    out_path: str | Path | None = None,
    on_step: Callable[[int, torch.nn.Module], None] | None = None,
) -> tuple[WeightBundle, TrainingLog]:
    """Clone the demonstrated actions; returns the policy bundle and log."""
    if cfg.task != demos.task:
        raise ConfigError(f"config task {cfg.task!r} != dataset task {demos.task!r}")
    policy, _ = initialize_policy(cfg, init_bundle)
    sampler = TransitionSampler(demos)
    opt = make_optimizer(policy.parameters(), cfg)
    tlog = TrainingLog(config=cfg.to_dict())

    for step in range(cfg.steps):
        t0 = time.perf_counter()
        step_seed = derive_step_seed(cfg.seed, step, label="bc-step")
        rng = np.random.default_rng(step_seed)
        items = sampler.sample(rng, cfg.batch_size)
        x = assemble_frame_batch(items, cfg.augment, step_seed, "bc", workers=cfg.workers)
        a = torch.from_numpy(
            np.stack([traj.actions[t] for traj, t in items]).astype(np.float32)
        )
        loss = bc_loss(policy(x), a, lambda_dir=cfg.lambda_dir)
        opt.zero_grad()
        loss.backward()
        opt.step()
        tlog.append(loss.item(), time.perf_counter() - t0)
        if on_step is not None:
            on_step(step, policy)
        if cfg.log_every and step % cfg.log_every == 0:
            log.info("bc step %d/%d loss %.4f", step, cfg.steps, loss.item())

    meta = CheckpointMeta(
        pretrain_mode="bc",
        steps=cfg.steps,
        source_dataset=demos.manifest.dataset_id,
        pretrain_depth=cfg.depth,
        seed=cfg.seed,
        init_from=cfg.init_mode.value,
    )
    bundle = bundle_from_module(policy, meta, config_echo=cfg.to_dict())
    if out_path is not None:
        save_checkpoint(bundle, out_path)
        log.info("saved policy checkpoint to %s", out_path)
    return bundle, tlog
