"""Ablation harness: encoder depth, play-data fraction, demonstration count.

Each grid point repeats over seeds with the full pipeline: self-supervised
pretraining on (possibly subsampled) play data, behavior cloning with the
play initialization, then held-out evaluation. All rows in one sweep share
the same held-out split, identified by a fingerprint of its trajectory ids.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import statistics
from dataclasses import dataclass
from pathlib import Path

from playbc.bc import BCConfig, InitMode, train_bc
from playbc.datasets import DemoDataset, PlayDataset, subsample_fraction, subsample_trajectories
from playbc.errors import ConfigError
from playbc.evaluation.evaluate import evaluate_mse
from playbc.models import Policy, PolicyConfig, build_policy, load_into_module
from playbc.pretrain import PretrainConfig, pretrain_byol

log = logging.getLogger(__name__)

ABLATION_KINDS = ("layers", "play_fraction", "demo_count")


@dataclass(frozen=True)
class AblationRow:
    kind: str
    grid_value: float
    seed: int
    task: str
    init_mode: str
    mse: float


def split_fingerprint(demos: DemoDataset) -> str:
    material = "\n".join(sorted(demos.trajectory_ids)).encode("utf-8")
    return hashlib.blake2b(material, digest_size=8).hexdigest()


def _policy_from_bundle(bundle, input_size: int) -> Policy:
    policy = build_policy(PolicyConfig(input_size=input_size), seed=0)
    load_into_module(bundle, policy)
    return policy


def run_ablation(
    kind: str,
    values: list,
    seeds: list[int],
    play_ds: PlayDataset,
    demos_train: DemoDataset,
    demos_heldout: DemoDataset,
    pretrain_cfg: PretrainConfig,
    bc_cfg: BCConfig,
) -> list[AblationRow]:
    """Run the full pipeline for every (value, seed) grid point."""
    if kind not in ABLATION_KINDS:
        raise ConfigError(f"kind must be one of {ABLATION_KINDS}, got {kind!r}")
    if not values or not seeds:
        raise ConfigError("values and seeds must be non-empty")
    split = split_fingerprint(demos_heldout)
    log.info("ablation %s over %s, seeds %s, heldout split %s", kind, values, seeds, split)

    rows = []
    for value in values:
        for seed in seeds:
            p_cfg = dataclasses.replace(pretrain_cfg, seed=seed)
            b_cfg = dataclasses.replace(bc_cfg, seed=seed, init_mode=InitMode.PLAY)
            play = play_ds
            demos = demos_train
            if kind == "layers":
                p_cfg = dataclasses.replace(p_cfg, depth=int(value))
                b_cfg = dataclasses.replace(b_cfg, depth=int(value))
            elif kind == "play_fraction":
                play = subsample_fraction(play_ds, float(value), seed=seed)
            else:
                demos = subsample_trajectories(demos_train, int(value), seed=seed)

            pre_bundle, _ = pretrain_byol(play, p_cfg)
            policy_bundle, _ = train_bc(demos, b_cfg, init_bundle=pre_bundle)
            policy = _policy_from_bundle(policy_bundle, b_cfg.input_size)
            report = evaluate_mse(
                policy,
                demos_heldout,
                input_size=b_cfg.input_size,
                init_mode=InitMode.PLAY.value,
            )
            rows.append(
                AblationRow(
                    kind=kind,
                    grid_value=float(value),
                    seed=seed,
                    task=b_cfg.task,
                    init_mode=InitMode.PLAY.value,
                    mse=report.mse,
                )
            )
            log.info("%s=%s seed=%d -> mse %.5f", kind, value, seed, report.mse)
    return rows


def ablation_csv(rows: list[AblationRow]) -> str:
    lines = ["kind,grid_value,seed,task,init_mode,mse"]
    lines += [
        f"{r.kind},{r.grid_value:g},{r.seed},{r.task},{r.init_mode},{r.mse:.8g}" for r in rows
    ]
    return "\n".join(lines) + "\n"


def write_ablation_csv(rows: list[AblationRow], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(ablation_csv(rows), encoding="utf-8")
    return path


def read_ablation_csv(path: str | Path) -> list[AblationRow]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "kind,grid_value,seed,task,init_mode,mse":
        raise ConfigError(f"{path}: not an ablation CSV")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        kind, value, seed, task, mode, mse = line.split(",")
        rows.append(AblationRow(kind, float(value), int(seed), task, mode, float(mse)))
    return rows


def median_by_value(rows: list[AblationRow]) -> dict[float, float]:
    """Median MSE per grid value, across seeds."""
    grouped: dict[float, list[float]] = {}
    for r in rows:
        grouped.setdefault(r.grid_value, []).append(r.mse)
    return {v: statistics.median(ms) for v, ms in sorted(grouped.items())}
