from playbc.synth.demos import (
    DEMO_TASKS,
    expert_push_action,
    expert_reach_action,
    generate_expert_demos,
    push_done,
    reach_done,
    rollout_demo,
)
from playbc.synth.playgen import generate_play_synthetic, random_state, rollout_play, traj_rng
from playbc.synth.world import (
    PALETTES,
    SynthConfig,
    WorldState,
    clip_action,
    hue_to_rgb,
    render_world,
    sample_object_color,
    step_world,
)

__all__ = [
    "DEMO_TASKS",
    "PALETTES",
    "SynthConfig",
    "WorldState",
    "clip_action",
    "expert_push_action",
    "expert_reach_action",
    "generate_expert_demos",
    "generate_play_synthetic",
    "hue_to_rgb",
    "random_state",
    "render_world",
    "reach_done",
    "push_done",
    "rollout_demo",
    "rollout_play",
    "sample_object_color",
    "step_world",
    "traj_rng",
]
