"""Synthetic world: rendering oracles, dynamics, generators, scripted experts."""

import colorsys

import numpy as np
import pytest

from playbc.datasets import load_demo_dataset, load_play_dataset
from playbc.errors import ConfigError, GenerationError
from playbc.synth import (
    PALETTES,
    SynthConfig,
    WorldState,
    clip_action,
    expert_push_action,
    generate_expert_demos,
    generate_play_synthetic,
    hue_to_rgb,
    push_done,
    reach_done,
    render_world,
    rollout_demo,
    rollout_play,
    sample_object_color,
    step_world,
    traj_rng,
)

CFG = SynthConfig()


def centroid_of(mask):
    ii, jj = np.nonzero(mask)
    return float(jj.mean()), float(ii.mean())


class TestRendering:
    def test_agent_centroid_at_image_center(self):
        # world (0.5, 0.5) maps to pixel center (0.5 * 64 - 0.5) = 31.5 on
        # both axes; the 6x6 agent square is symmetric about it, so the
        # centroid of agent-colored pixels is exactly (31.5, 31.5).
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.15, 0.15))
        img = render_world(state, CFG)
        mask = (img == np.array(CFG.agent_color, dtype=np.uint8)).all(axis=-1)
        assert mask.sum() == (2 * CFG.agent_half) ** 2  # 6x6 block
        assert centroid_of(mask) == (31.5, 31.5)

    def test_object_centroid_and_color(self):
        state = WorldState(agent_xy=(0.1, 0.1), object_xy=(0.5, 0.5), object_color=(17, 130, 200))
        img = render_world(state, CFG)
        mask = (img == np.array([17, 130, 200], dtype=np.uint8)).all(axis=-1)
        assert mask.sum() > 0
        assert centroid_of(mask) == (31.5, 31.5)  # disc symmetric about center

    def test_frame_shape_and_dtype(self):
        img = render_world(WorldState(agent_xy=(0.3, 0.7), object_xy=(0.6, 0.4)), CFG)
        assert img.shape == (64, 64, 3) and img.dtype == np.uint8

    def test_goal_ring_painted_only_when_present(self):
        goal_px = np.array(CFG.goal_color, dtype=np.uint8)
        with_goal = render_world(
            WorldState(agent_xy=(0.2, 0.2), object_xy=(0.8, 0.8), goal_xy=(0.5, 0.5)), CFG
        )
        without = render_world(WorldState(agent_xy=(0.2, 0.2), object_xy=(0.8, 0.8)), CFG)
        assert (with_goal == goal_px).all(axis=-1).any()
        assert not (without == goal_px).all(axis=-1).any()

    def test_agent_drawn_over_object(self):
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.5, 0.5))
        img = render_world(state, CFG)
        # the center pixel belongs to the agent even though the disc covers it
        assert tuple(img[31, 31]) == CFG.agent_color

    def test_render_deterministic(self):
        state = WorldState(agent_xy=(0.37, 0.61), object_xy=(0.52, 0.44), goal_xy=(0.8, 0.2))
        a, b = render_world(state, CFG), render_world(state, CFG)
        assert np.array_equal(a, b)


class TestPalettes:
    @pytest.mark.parametrize("name", ["full", "warm", "cool"])
    def test_sampled_hue_stays_in_band(self, name):
        lo, hi = PALETTES[name]
        rng = np.random.default_rng(0)
        for _ in range(50):
            r, g, b = sample_object_color(rng, name)
            hue = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)[0]
            assert lo - 0.01 <= hue <= hi + 0.01

    def test_warm_and_cool_bands_disjoint(self):
        assert PALETTES["warm"][1] < PALETTES["cool"][0]

    def test_unknown_palette_rejected(self):
        with pytest.raises(ConfigError, match="palette"):
            sample_object_color(np.random.default_rng(0), "neon")

    def test_hue_to_rgb_never_grayscale(self):
        for hue in np.linspace(0.0, 1.0, 17):
            r, g, b = hue_to_rgb(float(hue))
            assert not (r == g == b)


class TestDynamics:
    def test_free_step_displaces_agent_exactly(self):
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.9, 0.9))
        nxt = step_world(state, np.array([0.02, -0.01]), CFG)
        assert np.allclose(nxt.agent_xy, [0.52, 0.49], atol=1e-15)
        assert np.array_equal(nxt.object_xy, state.object_xy)  # untouched

    def test_push_holds_object_at_contact_distance(self):
        # agent closes a 0.01 gap beyond contact by moving 0.02 along +x, so
        # the object is re-extruded to exactly contact_dist ahead of it.
        c = CFG.contact_dist
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.5 + c + 0.01, 0.5))
        nxt = step_world(state, np.array([0.02, 0.0]), CFG)
        assert np.allclose(nxt.agent_xy, [0.52, 0.5], atol=1e-15)
        assert np.allclose(nxt.object_xy, [0.52 + c, 0.5], atol=1e-12)

    def test_exact_overlap_pushes_along_plus_x(self):
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.5, 0.5))
        nxt = step_world(state, np.array([0.0, 0.0]), CFG)
        assert np.allclose(nxt.object_xy, [0.5 + CFG.contact_dist, 0.5], atol=1e-12)

    def test_wall_clips_agent(self):
        state = WorldState(agent_xy=(CFG.agent_margin, 0.5), object_xy=(0.9, 0.9))
        nxt = step_world(state, np.array([-0.05, 0.0]), CFG)
        assert nxt.agent_xy[0] == CFG.agent_margin

    def test_wall_clips_object(self):
        c = CFG.contact_dist
        state = WorldState(agent_xy=(0.5, CFG.object_margin + c - 0.001), object_xy=(0.5, CFG.object_margin))
        nxt = step_world(state, np.array([0.0, -0.01]), CFG)
        assert nxt.object_xy[1] == CFG.object_margin

    def test_step_world_pure(self):
        state = WorldState(agent_xy=(0.5, 0.5), object_xy=(0.6, 0.5))
        agent_before = state.agent_xy.copy()
        object_before = state.object_xy.copy()
        step_world(state, np.array([0.05, 0.0]), CFG)
        assert np.array_equal(state.agent_xy, agent_before)
        assert np.array_equal(state.object_xy, object_before)

    def test_clip_action_caps_magnitude(self):
        a = clip_action(np.array([1.0, 1.0]), CFG)
        assert np.hypot(*a) == pytest.approx(CFG.action_scale, abs=1e-12)
        small = clip_action(np.array([0.01, 0.0]), CFG)
        assert np.array_equal(small, [0.01, 0.0])

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            SynthConfig(size=8)
        with pytest.raises(ConfigError):
            SynthConfig(action_scale=0.9)


class TestPlayGeneration:
    def test_shapes_and_bounds(self):
        ds = generate_play_synthetic(CFG, n_trajectories=3, n_frames=20, seed=0)
        assert len(ds) == 3 and ds.n_frames == 60
        for traj in ds:
            frames = np.stack([traj.frame(i) for i in range(traj.n_frames)])
            # dataset accessors hand out validated float frames in [0, 1]
            assert frames.shape == (20, 64, 64, 3) and frames.dtype == np.float32
            assert 0.0 <= frames.min() and frames.max() <= 1.0

    def test_action_rows_bounded_and_planar(self):
        rng = traj_rng(0, "play", 0)
        _, actions, _ = rollout_play(rng, CFG, 100)
        norms = np.linalg.norm(actions, axis=1)
        assert norms.max() <= CFG.action_scale + 1e-12
        assert np.array_equal(actions[:, 2], np.zeros(len(actions)))

    def test_teleport_rows_are_zero_but_frames_move(self):
        # seed 0 produces several teleports in 100 frames; a teleport row has
        # an all-zero action while consecutive frames still differ.
        rng = traj_rng(0, "play", 0)
        frames, actions, _ = rollout_play(rng, CFG, 100)
        zero_rows = np.where(~actions.any(axis=1))[0]
        teleports = [t for t in zero_rows if not np.array_equal(frames[t], frames[t + 1])]
        assert len(teleports) >= 1

    def test_near_fraction_reported(self):
        rng = traj_rng(0, "play", 0)
        _, _, stats = rollout_play(rng, CFG, 80)
        assert 0.0 <= stats["near_fraction"] <= 1.0

    def test_corpus_spends_time_near_object(self):
        fracs = []
        for i in range(6):
            _, _, stats = rollout_play(traj_rng(1, "play", i), CFG, 80)
            fracs.append(stats["near_fraction"])
        assert float(np.mean(fracs)) > 0.1

    def test_generation_deterministic(self):
        a = generate_play_synthetic(CFG, 2, 15, seed=5)
        b = generate_play_synthetic(CFG, 2, 15, seed=5)
        for ta, tb in zip(a, b):
            assert ta.id == tb.id
            assert np.array_equal(ta.frame(0), tb.frame(0))
            assert np.array_equal(ta.frame(14), tb.frame(14))
        c = generate_play_synthetic(CFG, 2, 15, seed=6)
        assert not np.array_equal(a.trajectories[0].frame(5), c.trajectories[0].frame(5))

    def test_bad_args_rejected(self):
        with pytest.raises(ConfigError):
            generate_play_synthetic(CFG, 0, 10, seed=0)
        with pytest.raises(ConfigError):
            generate_play_synthetic(CFG, 1, 1, seed=0)

    def test_disk_replay_byte_identical(self, tmp_path):
        r1, r2 = tmp_path / "a", tmp_path / "b"
        generate_play_synthetic(CFG, 2, 12, seed=3, root=r1)
        generate_play_synthetic(CFG, 2, 12, seed=3, root=r2)
        assert (r1 / "manifest.json").read_bytes() == (r2 / "manifest.json").read_bytes()
        ds = load_play_dataset(r1, check_checksums=True)
        assert ds.trajectory_ids == ["play0000", "play0001"]


class TestExperts:
    @pytest.mark.parametrize(
        "agent,obj,goal",
        [
            ((0.2, 0.5), (0.5, 0.5), (0.8, 0.5)),  # straight push
            ((0.8, 0.5), (0.5, 0.5), (0.2, 0.5)),  # must orbit half the circle
            ((0.5, 0.85), (0.5, 0.5), (0.5, 0.2)),  # vertical
            ((0.15, 0.15), (0.2, 0.8), (0.85, 0.3)),  # diagonal with detour
            ((0.9, 0.9), (0.15, 0.5), (0.5, 0.15)),  # object near wall
        ],
    )
    def test_push_expert_reaches_goal(self, agent, obj, goal):
        state = WorldState(agent_xy=agent, object_xy=obj, goal_xy=goal)
        for _ in range(150):
            if push_done(state, CFG):
                break
            state = step_world(state, expert_push_action(state, CFG), CFG)
        assert push_done(state, CFG)
        assert np.hypot(*(state.object_xy - state.goal_xy)) <= CFG.goal_tolerance

    def test_push_expert_requires_goal(self):
        with pytest.raises(ConfigError, match="goal"):
            expert_push_action(WorldState(agent_xy=(0.2, 0.2), object_xy=(0.5, 0.5)), CFG)

    def test_reach_expert_touches_object(self):
        state = WorldState(agent_xy=(0.1, 0.9), object_xy=(0.8, 0.2))
        for _ in range(60):
            if reach_done(state, CFG):
                break
            state = step_world(state, np.array([*(state.object_xy - state.agent_xy)]), CFG)
        assert reach_done(state, CFG)

    def test_rollout_demo_labels_match_frame_count(self):
        frames, actions = rollout_demo(traj_rng(0, "demo-push-warm", 0), CFG, "push", "warm", 120)
        assert actions.shape == (len(frames) - 1, 3)
        assert np.abs(actions[:, 2]).max() == 0.0
        assert np.linalg.norm(actions[:, :2], axis=1).max() <= CFG.action_scale + 1e-12
        assert np.abs(actions).max() > 0.0  # the expert actually moves

    def test_rollout_demo_unknown_task(self):
        with pytest.raises(ConfigError, match="task"):
            rollout_demo(np.random.default_rng(0), CFG, "juggle", "warm", 50)

    def test_nonconvergence_raises_after_bounded_retries(self, monkeypatch):
        # force every start to be already solved, so all retries are burned
        import playbc.synth.demos as demos_mod

        calls = []

        def solved_state(rng, cfg, palette, with_goal):
            calls.append(1)
            return WorldState(agent_xy=(0.5, 0.5), object_xy=(0.5, 0.5), goal_xy=(0.5, 0.5))

        monkeypatch.setattr(demos_mod, "random_state", solved_state)
        with pytest.raises(GenerationError, match="converge"):
            rollout_demo(np.random.default_rng(0), CFG, "push", "warm", 50)
        assert len(calls) == demos_mod.MAX_RETRIES


class TestDemoGeneration:
    def test_dataset_properties(self):
        ds = generate_expert_demos(CFG, "push", n_trajectories=3, seed=0)
        assert ds.task == "push" and len(ds) == 3
        assert ds.n_transitions == ds.n_frames - 3
        for traj in ds:
            assert traj.actions is not None and traj.n_frames >= 2

    def test_demo_object_hue_respects_palette(self):
        for palette in ("warm", "cool"):
            ds = generate_expert_demos(CFG, "reach", 2, seed=4, palette=palette)
            lo, hi = PALETTES[palette]
            for traj in ds:
                frame = traj.frame(0)
                hue = object_hue_in(frame)
                assert lo - 0.01 <= hue <= hi + 0.01

    def test_generation_deterministic(self):
        a = generate_expert_demos(CFG, "push", 2, seed=9)
        b = generate_expert_demos(CFG, "push", 2, seed=9)
        for ta, tb in zip(a, b):
            assert ta.n_frames == tb.n_frames
            assert np.array_equal(ta.actions, tb.actions)
            assert np.array_equal(ta.frame(ta.n_frames - 1), tb.frame(tb.n_frames - 1))

    def test_palettes_give_distinct_corpora(self):
        warm = generate_expert_demos(CFG, "push", 1, seed=2, palette="warm")
        cool = generate_expert_demos(CFG, "push", 1, seed=2, palette="cool")
        assert not np.array_equal(warm.trajectories[0].frame(0), cool.trajectories[0].frame(0))

    def test_disk_replay_byte_identical(self, tmp_path):
        r1, r2 = tmp_path / "a", tmp_path / "b"
        generate_expert_demos(CFG, "push", 2, seed=1, root=r1)
        generate_expert_demos(CFG, "push", 2, seed=1, root=r2)
        assert (r1 / "manifest.json").read_bytes() == (r2 / "manifest.json").read_bytes()
        ds = load_demo_dataset(r1, task="push", check_checksums=True)
        assert ds.n_transitions > 0

    def test_bad_args_rejected(self):
        with pytest.raises(ConfigError):
            generate_expert_demos(CFG, "push", 0, seed=0)
        with pytest.raises(ConfigError):
            generate_expert_demos(CFG, "push", 1, seed=0, max_frames=1)


def object_hue_in(frame: np.ndarray) -> float:
    """Recover the object hue from a rendered frame.

    The object disc is the only saturated region: background is gray, the
    agent is near-black gray, the goal ring near-white gray. Accepts either
    raw uint8 frames or the float [0, 1] frames dataset accessors return.
    """
    flat = frame.reshape(-1, 3).astype(np.float64)
    if frame.dtype == np.uint8:
        flat /= 255.0
    saturated = flat[(flat.max(axis=1) - flat.min(axis=1)) > 0.12]
    assert len(saturated) > 0, "no object pixels found"
    r, g, b = saturated[0]
    return colorsys.rgb_to_hsv(r, g, b)[0]
