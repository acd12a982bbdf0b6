"""Pairing, subsampling, and splitting of corpora. All seeded and pure."""

from __future__ import annotations

import dataclasses

import numpy as np

from playbc.datasets.types import DemoDataset, PlayDataset, Trajectory


def temporal_pairs(traj: Trajectory | int, offset: int = 3) -> list[tuple[int, int]]:
    """Index pairs (t, t + offset) within one trajectory, t ascending.

    Accepts a Trajectory or a bare frame count. Short trajectories yield an
    empty list; there are exactly max(0, n_frames - offset) pairs.
    """
    if offset < 1:
        raise ValueError(f"offset must be >= 1, got {offset}")
    n = traj if isinstance(traj, int) else traj.n_frames
    return [(t, t + offset) for t in range(max(0, n - offset))]


def _derived_manifest(base: PlayDataset | DemoDataset, kept: list[Trajectory], suffix: str):
    entries = {e.id: e for e in base.manifest.trajectories}
    return dataclasses.replace(
        base.manifest,
        dataset_id=base.manifest.dataset_id + suffix,
        trajectories=tuple(entries[t.id] for t in kept),
    )


def subsample_fraction(ds: PlayDataset, fraction: float, seed: int) -> PlayDataset:
    """Keep whole trajectories until >= fraction of total frames is covered.

    Selection walks a single seeded permutation, so for a fixed seed the
    selected trajectory set is monotone in the fraction. fraction = 1 returns
    the dataset unchanged.
    """
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if fraction == 1.0:
        return ds
    target = fraction * ds.n_frames
    perm = np.random.default_rng(seed).permutation(len(ds.trajectories))
    selected: set[int] = set()
    covered = 0
    for idx in perm:
        selected.add(int(idx))
        covered += ds.trajectories[idx].n_frames
        if covered >= target:
            break
    kept = [t for i, t in enumerate(ds.trajectories) if i in selected]
    return PlayDataset(
        trajectories=kept,
        manifest=_derived_manifest(ds, kept, f"~frac{fraction:g}@{seed}"),
        root=ds.root,
    )


def split_holdout(ds: DemoDataset, n_holdout: int, seed: int) -> tuple[DemoDataset, DemoDataset]:
    """Split whole trajectories into (train, test), test getting n_holdout."""
    n = len(ds.trajectories)
    if not (0 <= n_holdout < n):
        raise ValueError(f"n_holdout must lie in [0, {n}), got {n_holdout}")
    perm = np.random.default_rng(seed).permutation(n)
    holdout_idx = set(int(i) for i in perm[:n_holdout])
    train = [t for i, t in enumerate(ds.trajectories) if i not in holdout_idx]
    test = [t for i, t in enumerate(ds.trajectories) if i in holdout_idx]
    make = lambda kept, tag: DemoDataset(
        trajectories=kept,
        manifest=_derived_manifest(ds, kept, tag),
        task=ds.task,
        root=ds.root,
    )
    return make(train, f"~train@{seed}"), make(test, f"~test@{seed}")


def subsample_trajectories(ds: DemoDataset, n: int, seed: int) -> DemoDataset:
    """Keep n seeded-random whole trajectories (demo-count ablations)."""
    if not (1 <= n <= len(ds.trajectories)):
        raise ValueError(f"n must lie in [1, {len(ds.trajectories)}], got {n}")
    perm = np.random.default_rng(seed).permutation(len(ds.trajectories))
    keep = set(int(i) for i in perm[:n])
    kept = [t for i, t in enumerate(ds.trajectories) if i in keep]
    return DemoDataset(
        trajectories=kept,
        manifest=_derived_manifest(ds, kept, f"~n{n}@{seed}"),
        task=ds.task,
        root=ds.root,
    )
