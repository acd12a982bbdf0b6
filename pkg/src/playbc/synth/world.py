"""A procedural 2D tabletop: one agent, one object, optional goal marker.

Positions live in continuous [0, 1]^2 world coordinates; rendering maps
them onto a square pixel grid with half-pixel centers (world x maps to
pixel-center coordinate x * size - 0.5). The agent is a dark square, the
object a filled colored disc, the goal a thin ring. Scenes can optionally
carry background clutter: grey-toned rectangles sampled once per scene and
static for the whole trajectory, drawn beneath every task entity. Clutter
makes appearance vary across scenes without touching the dynamics, which
is what separates visually robust features from ones that memorize the
training frames. Dynamics are kinematic: the agent moves by the commanded
displacement (clipped to the per-step limit and the arena walls) and
shoves the object ahead of it on contact.

Everything here is pure and deterministic; all randomness stays in the
generators (playgen/demos).
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np

from playbc.errors import ConfigError

# hue windows for the train/heldout appearance split: warm-colored objects
# in the demonstrations, cool-colored ones held out, full wheel in play
PALETTES = {
    "full": (0.0, 1.0),
    "warm": (0.0, 0.17),
    "cool": (0.5, 0.67),
}


@dataclass(frozen=True)
class SynthConfig:
    size: int = 64
    agent_half: int = 3  # agent square half-side, px
    object_radius: int = 5  # px
    goal_radius: int = 4  # ring radius, px
    action_scale: float = 0.06  # per-step displacement cap, world units
    agent_color: tuple[int, int, int] = (40, 40, 40)
    goal_color: tuple[int, int, int] = (250, 250, 250)

    def __post_init__(self):
        if self.size < 16:
            raise ConfigError(f"size must be >= 16, got {self.size}")
        if not (0.0 < self.action_scale < 0.5):
            raise ConfigError(f"action_scale must lie in (0, 0.5), got {self.action_scale}")

    @property
    def agent_margin(self) -> float:
        return (self.agent_half + 1.0) / self.size

    @property
    def object_margin(self) -> float:
        return (self.object_radius + 1.0) / self.size

    @property
    def contact_dist(self) -> float:
        """Center distance at which the agent square touches the object disc."""
        return (self.agent_half + self.object_radius) / self.size

    @property
    def goal_tolerance(self) -> float:
        return self.goal_radius / self.size


@dataclass
class WorldState:
    agent_xy: np.ndarray  # (2,) float64, world coords
    object_xy: np.ndarray
    goal_xy: np.ndarray | None = None
    object_color: tuple[int, int, int] = (200, 60, 60)
    bg_color: tuple[int, int, int] = (230, 230, 230)

    def __post_init__(self):
        self.agent_xy = np.asarray(self.agent_xy, dtype=np.float64)
        self.object_xy = np.asarray(self.object_xy, dtype=np.float64)
        if self.goal_xy is not None:
            self.goal_xy = np.asarray(self.goal_xy, dtype=np.float64)


def hue_to_rgb(hue: float, saturation: float = 0.85, value: float = 0.85) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb(hue % 1.0, saturation, value)
    return (int(round(r * 255)), int(round(g * 255)), int(round(b * 255)))


def sample_object_color(rng: np.random.Generator, palette: str) -> tuple[int, int, int]:
    if palette not in PALETTES:
        raise ConfigError(f"palette must be one of {sorted(PALETTES)}, got {palette!r}")
    lo, hi = PALETTES[palette]
    return hue_to_rgb(float(rng.uniform(lo, hi)))


def render_world(state: WorldState, cfg: SynthConfig) -> np.ndarray:
    """Rasterize the state to an (size, size, 3) uint8 frame."""
    s = cfg.size
    img = np.empty((s, s, 3), dtype=np.uint8)
    img[:] = np.asarray(state.bg_color, dtype=np.uint8)
    ii, jj = np.mgrid[0:s, 0:s].astype(np.float64)

    if state.goal_xy is not None:
        gx, gy = state.goal_xy * s - 0.5
        d = np.sqrt((jj - gx) ** 2 + (ii - gy) ** 2)
        img[np.abs(d - cfg.goal_radius) <= 1.0] = cfg.goal_color

    ox, oy = state.object_xy * s - 0.5
    disc = (jj - ox) ** 2 + (ii - oy) ** 2 <= cfg.object_radius**2
    img[disc] = state.object_color

    ax, ay = state.agent_xy * s - 0.5
    square = (np.abs(jj - ax) <= cfg.agent_half) & (np.abs(ii - ay) <= cfg.agent_half)
    img[square] = cfg.agent_color
    return img


def clip_action(action: np.ndarray, cfg: SynthConfig) -> np.ndarray:
    """Project a planar displacement onto the per-step magnitude cap."""
    a = np.asarray(action, dtype=np.float64)[:2]
    norm = float(np.hypot(a[0], a[1]))
    if norm > cfg.action_scale:
        a = a * (cfg.action_scale / norm)
    return a


def step_world(state: WorldState, action: np.ndarray, cfg: SynthConfig) -> WorldState:
    """Advance one tick; returns a new state, inputs are untouched."""
    a = clip_action(action, cfg)
    agent = np.clip(state.agent_xy + a, cfg.agent_margin, 1.0 - cfg.agent_margin)
    obj = state.object_xy.copy()
    delta = obj - agent
    dist = float(np.hypot(delta[0], delta[1]))
    if dist < cfg.contact_dist:
        direction = delta / dist if dist > 1e-9 else np.array([1.0, 0.0])
        obj = agent + direction * cfg.contact_dist
        obj = np.clip(obj, cfg.object_margin, 1.0 - cfg.object_margin)
    return WorldState(
        agent_xy=agent,
        object_xy=obj,
        goal_xy=None if state.goal_xy is None else state.goal_xy.copy(),
        object_color=state.object_color,
        bg_color=state.bg_color,
    )
