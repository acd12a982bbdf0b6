"""Scripted experts that produce demonstration corpora with action labels.

Two tasks are available:

- ``push``: shove the object until it sits inside the goal ring. The expert
  orbits to the pocket behind the object (opposite the goal), then presses
  through it; pressing from the pocket keeps the push line stable.
- ``reach``: drive the agent square onto the object and stop at contact.

Action labels are the *realized* planar displacement of the agent between
consecutive frames, padded with a zero third component, so labels remain
truthful when wall clipping shortens a step.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from playbc.datasets import (
    ArrayFrames,
    DatasetManifest,
    DemoDataset,
    ManifestEntry,
    Trajectory,
    TrajectoryMeta,
    finalize_corpus,
    load_demo_dataset,
    write_trajectory,
)
from playbc.errors import ConfigError, GenerationError
from playbc.synth.playgen import random_state, traj_rng
from playbc.synth.world import SynthConfig, WorldState, clip_action, render_world, step_world

log = logging.getLogger(__name__)

DEMO_TASKS = ("push", "reach")

# Pocket controller constants (world units are fractions of the arena side).
POCKET_DEPTH = 0.8  # pocket sits this many contact distances behind the object
ORBIT_RADIUS = 1.8  # orbit circle radius, in contact distances
POCKET_SECTOR = 0.35  # rad; within this bearing error we press instead of orbit
MAX_RETRIES = 8


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    return v / n if n > 1e-9 else np.array([1.0, 0.0])


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def expert_push_action(state: WorldState, cfg: SynthConfig) -> np.ndarray:
    """One planar control step of the pocket-pushing expert."""
    if state.goal_xy is None:
        raise ConfigError("push expert needs a goal in the state")
    d = _unit(state.goal_xy - state.object_xy)  # desired push direction
    rel = state.agent_xy - state.object_xy
    phi = math.atan2(rel[1], rel[0])
    phi_pocket = math.atan2(-d[1], -d[0])
    dphi = _wrap_angle(phi_pocket - phi)
    if abs(dphi) > POCKET_SECTOR:
        # Orbit the object toward the pocket, never cutting through it.
        radius = ORBIT_RADIUS * cfg.contact_dist
        max_turn = cfg.action_scale / radius
        phi_next = phi + float(np.clip(dphi, -max_turn, max_turn))
        waypoint = state.object_xy + radius * np.array([math.cos(phi_next), math.sin(phi_next)])
    else:
        # Press through the pocket just behind the object.
        waypoint = state.object_xy - d * (POCKET_DEPTH * cfg.contact_dist)
    return clip_action(waypoint - state.agent_xy, cfg)


def expert_reach_action(state: WorldState, cfg: SynthConfig) -> np.ndarray:
    """Head straight for the object."""
    return clip_action(state.object_xy - state.agent_xy, cfg)


def push_done(state: WorldState, cfg: SynthConfig) -> bool:
    return float(np.hypot(*(state.object_xy - state.goal_xy))) <= cfg.goal_tolerance


def reach_done(state: WorldState, cfg: SynthConfig) -> bool:
    gap = float(np.hypot(*(state.object_xy - state.agent_xy)))
    return gap <= 1.05 * cfg.contact_dist


_EXPERTS = {"push": (expert_push_action, push_done), "reach": (expert_reach_action, reach_done)}


def rollout_demo(rng: np.random.Generator, cfg: SynthConfig, task: str, palette: str, max_frames: int):
    """Run the scripted expert from a fresh state; retries unsolved starts.

    Returns (frames, actions) on success. Raises GenerationError when no
    attempt converges within ``max_frames`` frames.
    """
    if task not in _EXPERTS:
        raise ConfigError(f"task must be one of {DEMO_TASKS}, got {task!r}")
    policy, done = _EXPERTS[task]
    for attempt in range(MAX_RETRIES):
        state = random_state(rng, cfg, palette=palette, with_goal=(task == "push"))
        if done(state, cfg):  # already solved; useless as a demo
            continue
        frames = [render_world(state, cfg)]
        actions: list[np.ndarray] = []
        for _ in range(max_frames - 1):
            before = state.agent_xy.copy()
            state = step_world(state, policy(state, cfg), cfg)
            actions.append(np.array([*(state.agent_xy - before), 0.0]))
            frames.append(render_world(state, cfg))
            if done(state, cfg):
                return np.stack(frames), np.stack(actions)
        log.debug("expert attempt %d did not converge in %d frames", attempt, max_frames)
    raise GenerationError(
        f"{task} expert failed to converge within {max_frames} frames after {MAX_RETRIES} starts"
    )


def generate_expert_demos(
    cfg: SynthConfig,
    task: str,
    n_trajectories: int,
    seed: int,
    max_frames: int = 120,
    palette: str = "warm",
    root: str | Path | None = None,
    dataset_id: str | None = None,
) -> DemoDataset:
    """Generate a demonstration corpus; in memory, or on disk when `root` is given.

    ``palette`` restricts object hues, which is how the train/held-out
    appearance split is created (demos on warm hues, evaluation on cool).
    """
    if n_trajectories < 1:
        raise ConfigError("need n_trajectories >= 1")
    if max_frames < 2:
        raise ConfigError("need max_frames >= 2")
    if dataset_id is None:
        dataset_id = f"synth-demos-{task}-{palette}"
    trajectories = []
    for i in range(n_trajectories):
        rng = traj_rng(seed, f"demo-{task}-{palette}", i)
        frames, actions = rollout_demo(rng, cfg, task, palette, max_frames)
        traj_id = f"demo{i:04d}"
        meta = TrajectoryMeta(collector="scripted-expert", location="synth-world", duration_s=len(frames) / 10.0)
        if root is not None:
            write_trajectory(root, traj_id, frames, actions=actions, meta=meta)
        else:
            trajectories.append(
                Trajectory(id=traj_id, frames=ArrayFrames(frames), actions=actions, meta=meta)
            )
    if root is not None:
        finalize_corpus(root, dataset_id)
        return load_demo_dataset(root, task=task)
    manifest = DatasetManifest(
        dataset_id=dataset_id,
        trajectories=tuple(
            ManifestEntry(id=t.id, n_frames=t.n_frames, checksum="") for t in trajectories
        ),
    )
    return DemoDataset(trajectories=trajectories, manifest=manifest, task=task)
