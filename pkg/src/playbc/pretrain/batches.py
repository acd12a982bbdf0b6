"""Pair sampling and deterministic batch assembly.

Sampling happens on the main thread from a per-step generator; item
augmentation is a pure function of its stream key, so the prefetch pool
only changes wall-clock time, never pixel values. Results are written back
by index, which keeps batch order independent of completion order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import torch

from playbc.datasets import AugmentConfig, PlayDataset, Trajectory, augment_frame
from playbc.errors import ConfigError


class TemporalPairSampler:
    """Uniform with-replacement sampler over all (t, t + offset) pairs."""

    def __init__(self, dataset: PlayDataset, offset: int = 3):
        if offset < 1:
            raise ValueError(f"offset must be >= 1, got {offset}")
        self.offset = offset
        self._pool: list[tuple[Trajectory, int]] = [
            (traj, t) for traj in dataset for t in range(max(0, traj.n_frames - offset))
        ]
        if not self._pool:
            raise ConfigError(
                f"no temporal pairs at offset {offset}: every trajectory is shorter "
                f"than {offset + 1} frames"
            )

    def __len__(self) -> int:
        return len(self._pool)

    def sample(self, rng: np.random.Generator, n: int) -> list[tuple[Trajectory, int, int]]:
        idx = rng.integers(0, len(self._pool), size=n)
        return [(self._pool[i][0], self._pool[i][1], self._pool[i][1] + self.offset) for i in idx]


class FrameSampler:
    """Uniform with-replacement sampler over all single frames (AE/VAE)."""

    def __init__(self, dataset: PlayDataset):
        self._pool: list[tuple[Trajectory, int]] = [
            (traj, i) for traj in dataset for i in range(traj.n_frames)
        ]
        if not self._pool:
            raise ConfigError("dataset has no frames")

    def __len__(self) -> int:
        return len(self._pool)

    def sample(self, rng: np.random.Generator, n: int) -> list[tuple[Trajectory, int]]:
        idx = rng.integers(0, len(self._pool), size=n)
        return [self._pool[i] for i in idx]


def _to_batch_tensor(frames: list[np.ndarray]) -> torch.Tensor:
    stacked = np.stack(frames)  # (B, S, S, 3) float32
    return torch.from_numpy(stacked).permute(0, 3, 1, 2).contiguous()


def assemble_frame_batch(
    items: list[tuple[Trajectory, int]],
    aug: AugmentConfig,
    step_seed: int,
    branch: str,
    workers: int = 0,
) -> torch.Tensor:
    """Augment the listed frames into a (B, 3, S, S) float tensor."""

    def one(item: tuple[Trajectory, int]) -> np.ndarray:
        traj, t = item
        return augment_frame(traj.frame(t), aug, (step_seed, traj.id, t, branch))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            frames = list(pool.map(one, items))
    else:
        frames = [one(item) for item in items]
    return _to_batch_tensor(frames)


def assemble_pair_batch(
    pairs: list[tuple[Trajectory, int, int]],
    aug: AugmentConfig,
    step_seed: int,
    workers: int = 0,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Augment temporal pairs into (query, key) batches.

    The query side sees frame t, the key side frame t + offset; the two
    sides use distinct branch tags so their augmentations are independent
    draws even at offset collisions.
    """
    queries = assemble_frame_batch([(tr, t) for tr, t, _ in pairs], aug, step_seed, "query", workers)
    keys = assemble_frame_batch([(tr, u) for tr, _, u in pairs], aug, step_seed, "key", workers)
    return queries, keys
