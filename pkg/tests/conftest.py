import numpy as np
import pytest

from playbc.datasets import (
    ArrayFrames,
    DatasetManifest,
    DemoDataset,
    ManifestEntry,
    PlayDataset,
    Trajectory,
    finalize_corpus,
    write_trajectory,
)


def make_frames(n, size=16, seed=0):
    rng = np.random.default_rng(seed)
    return ArrayFrames(rng.integers(0, 256, size=(n, size, size, 3), dtype=np.uint8))


def make_play_dataset(lengths, size=16, seed=0):
    trajs = [
        Trajectory(id=f"traj{i:03d}", frames=make_frames(n, size=size, seed=seed + i))
        for i, n in enumerate(lengths)
    ]
    manifest = DatasetManifest(
        dataset_id="mem-play",
        trajectories=tuple(ManifestEntry(id=t.id, n_frames=t.n_frames, checksum="") for t in trajs),
    )
    return PlayDataset(trajectories=trajs, manifest=manifest)


def make_demo_dataset(lengths, size=16, seed=0, task="push", action_scale=1.0):
    rng = np.random.default_rng(seed)
    trajs = []
    for i, n in enumerate(lengths):
        actions = rng.normal(scale=action_scale, size=(n - 1, 3))
        trajs.append(
            Trajectory(
                id=f"demo{i:03d}",
                frames=make_frames(n, size=size, seed=seed + 100 + i),
                actions=actions,
            )
        )
    manifest = DatasetManifest(
        dataset_id="mem-demo",
        trajectories=tuple(ManifestEntry(id=t.id, n_frames=t.n_frames, checksum="") for t in trajs),
    )
    return DemoDataset(trajectories=trajs, manifest=manifest, task=task)


def write_corpus(root, lengths, size=16, seed=0, with_actions=False, dataset_id="disk-corpus"):
    rng = np.random.default_rng(seed)
    for i, n in enumerate(lengths):
        frames = rng.integers(0, 256, size=(n, size, size, 3), dtype=np.uint8)
        actions = rng.normal(size=(n - 1, 3)) if with_actions else None
        write_trajectory(root, f"traj{i:03d}", frames, actions=actions)
    return finalize_corpus(root, dataset_id)


@pytest.fixture
def play_corpus_dir(tmp_path):
    root = tmp_path / "play"
    root.mkdir()
    write_corpus(root, [10, 8], dataset_id="play-tiny")
    return root


@pytest.fixture
def demo_corpus_dir(tmp_path):
    root = tmp_path / "demo"
    root.mkdir()
    write_corpus(root, [5, 7, 6], with_actions=True, dataset_id="demo-tiny")
    return root
