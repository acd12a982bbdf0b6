"""Unstructured interaction data: an agent that pokes things around.

The generator drives the agent with a smoothed random walk biased toward
the object, so a healthy share of frames shows contact and object motion;
occasional teleports ("drops") reset the agent elsewhere, imitating the
operator picking the arm up. Object colors span the full hue wheel so the
pretrained features see appearances the demonstrations never cover.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

import numpy as np

from playbc.datasets import (
    ArrayFrames,
    DatasetManifest,
    ManifestEntry,
    PlayDataset,
    Trajectory,
    TrajectoryMeta,
    finalize_corpus,
    load_play_dataset,
    write_trajectory,
)
from playbc.errors import ConfigError
from playbc.synth.world import SynthConfig, WorldState, clip_action, render_world, sample_object_color, step_world

log = logging.getLogger(__name__)

TELEPORT_PROB = 0.04
TOWARD_OBJECT_GAIN = 0.5
VELOCITY_SMOOTHING = 0.75


def traj_rng(seed: int, kind: str, index: int) -> np.random.Generator:
    material = json.dumps([seed, kind, index], separators=(",", ":"))
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=16).digest()
    return np.random.Generator(np.random.Philox(key=np.frombuffer(digest, dtype=np.uint64)))


def random_state(rng: np.random.Generator, cfg: SynthConfig, palette: str, with_goal: bool) -> WorldState:
    def spot(margin):
        return rng.uniform(margin, 1.0 - margin, size=2)

    bg = int(rng.integers(215, 245))
    return WorldState(
        agent_xy=spot(cfg.agent_margin),
        object_xy=spot(cfg.object_margin),
        goal_xy=spot(cfg.goal_tolerance + 0.05) if with_goal else None,
        object_color=sample_object_color(rng, palette),
        bg_color=(bg, bg, bg),
    )


def rollout_play(rng: np.random.Generator, cfg: SynthConfig, n_frames: int):
    """One play trajectory.

    Returns frames (n, s, s, 3) uint8, actions (n-1, 3) float64, and a stats
    dict with the fraction of steps spent near the object ("near" meaning
    within 1.5 contact distances, where pushes actually happen).
    """
    state = random_state(rng, cfg, palette="full", with_goal=False)
    frames = [render_world(state, cfg)]
    actions = np.zeros((n_frames - 1, 3), dtype=np.float64)
    velocity = np.zeros(2)
    near_steps = 0
    for t in range(n_frames - 1):
        if rng.uniform() < TELEPORT_PROB:
            # drop: pick the agent up and place it somewhere else
            state = WorldState(
                agent_xy=rng.uniform(cfg.agent_margin, 1.0 - cfg.agent_margin, size=2),
                object_xy=state.object_xy,
                object_color=state.object_color,
                bg_color=state.bg_color,
            )
            velocity = np.zeros(2)
            frames.append(render_world(state, cfg))
            continue  # a drop is not a labeled displacement; action stays 0
        toward = state.object_xy - state.agent_xy
        norm = float(np.hypot(toward[0], toward[1]))
        if norm > 1e-9:
            toward = toward / norm
        noise = rng.normal(scale=cfg.action_scale, size=2)
        velocity = (
            VELOCITY_SMOOTHING * velocity
            + (1 - VELOCITY_SMOOTHING) * (noise + TOWARD_OBJECT_GAIN * cfg.action_scale * toward)
        )
        before = state.agent_xy.copy()
        state = step_world(state, clip_action(velocity, cfg), cfg)
        moved = state.agent_xy - before  # wall clipping can shorten the step
        actions[t, :2] = moved
        gap = float(np.hypot(*(state.object_xy - state.agent_xy)))
        if gap <= 1.5 * cfg.contact_dist:
            near_steps += 1
        frames.append(render_world(state, cfg))
    stats = {"near_fraction": near_steps / max(n_frames - 1, 1)}
    return np.stack(frames), actions, stats


def generate_play_synthetic(
    cfg: SynthConfig,
    n_trajectories: int,
    n_frames: int,
    seed: int,
    root: str | Path | None = None,
    dataset_id: str = "synth-play",
) -> PlayDataset:
    """Generate a play corpus; in memory, or on disk when `root` is given."""
    if n_trajectories < 1 or n_frames < 2:
        raise ConfigError("need n_trajectories >= 1 and n_frames >= 2")
    trajectories = []
    for i in range(n_trajectories):
        rng = traj_rng(seed, "play", i)
        frames, actions, _ = rollout_play(rng, cfg, n_frames)
        traj_id = f"play{i:04d}"
        meta = TrajectoryMeta(collector="synthetic", location="synth-world", duration_s=n_frames / 10.0)
        if root is not None:
            write_trajectory(root, traj_id, frames, actions=actions, meta=meta)
        else:
            trajectories.append(
                Trajectory(id=traj_id, frames=ArrayFrames(frames), actions=actions, meta=meta)
            )
    if root is not None:
        finalize_corpus(root, dataset_id)
        return load_play_dataset(root)
    manifest = DatasetManifest(
        dataset_id=dataset_id,
        trajectories=tuple(
            ManifestEntry(id=t.id, n_frames=t.n_frames, checksum="") for t in trajectories
        ),
    )
    return PlayDataset(trajectories=trajectories, manifest=manifest)
