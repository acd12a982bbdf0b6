"""Arrow overlays for qualitative action inspection.

Actions live in R^3 but the camera sees a 2D projection; the overlay draws
the first two (transverse) components as an arrow from the frame center.
Predicted actions render in red, ground truth in green; actions whose
transverse norm is below 1e-6 render as a centered dot instead of an
arrow. One pixel-per-unit scale is shared by every arrow in a strip so
lengths stay comparable across frames.
"""

from __future__ import annotations

import math

import numpy as np
from PIL import Image, ImageDraw

from playbc.errors import ValidationError

PRED_COLOR = (255, 64, 64)
GT_COLOR = (64, 220, 64)
DOT_RADIUS = 3
_EPS = 1e-6


def _as_uint8(frame: np.ndarray) -> np.ndarray:
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValidationError(f"frame must be (H, W, 3), got {frame.shape}")
    if frame.dtype == np.uint8:
        return frame
    return (np.clip(frame, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def auto_scale(actions: list[np.ndarray], size: int) -> float:
    """Pixels per action unit: largest arrow spans 40% of the frame."""
    biggest = max((float(np.hypot(a[0], a[1])) for a in actions), default=0.0)
    return 0.4 * size / max(biggest, _EPS)


def _draw_arrow(draw: ImageDraw.ImageDraw, cx: float, cy: float, dx: float, dy: float, color) -> None:
    if math.hypot(dx, dy) < _EPS:
        draw.ellipse([cx - DOT_RADIUS, cy - DOT_RADIUS, cx + DOT_RADIUS, cy + DOT_RADIUS], fill=color)
        return
    tx, ty = cx + dx, cy + dy
    draw.line([cx, cy, tx, ty], fill=color, width=2)
    # two short head strokes at +-150 degrees from the shaft direction
    ang = math.atan2(dy, dx)
    head = max(4.0, 0.25 * math.hypot(dx, dy))
    for da in (math.radians(150), -math.radians(150)):
        hx = tx + head * math.cos(ang + da)
        hy = ty + head * math.sin(ang + da)
        draw.line([tx, ty, hx, hy], fill=color, width=2)


def render_action_overlay(
    frame: np.ndarray,
    pred: np.ndarray,
    gt: np.ndarray | None = None,
    scale: float | None = None,
) -> np.ndarray:
    """Return a copy of the frame with action arrows drawn from its center."""
    pred = np.asarray(pred, dtype=np.float64)
    if pred.shape != (3,):
        raise ValidationError(f"action must have shape (3,), got {pred.shape}")
    if gt is not None:
        gt = np.asarray(gt, dtype=np.float64)
        if gt.shape != (3,):
            raise ValidationError(f"action must have shape (3,), got {gt.shape}")
    img = Image.fromarray(_as_uint8(frame))
    h, w = img.height, img.width
    if scale is None:
        drawn = [pred] if gt is None else [pred, gt]
        scale = auto_scale(drawn, min(h, w))
    draw = ImageDraw.Draw(img)
    if gt is not None:
        _draw_arrow(draw, w / 2.0, h / 2.0, scale * gt[0], scale * gt[1], GT_COLOR)
    _draw_arrow(draw, w / 2.0, h / 2.0, scale * pred[0], scale * pred[1], PRED_COLOR)
    return np.asarray(img)


def render_overlay_strip(
    frames: list[np.ndarray],
    preds: list[np.ndarray],
    gts: list[np.ndarray] | None = None,
    gap: int = 2,
) -> np.ndarray:
    """Horizontally composite per-frame overlays with a shared arrow scale."""
    if not frames:
        raise ValidationError("overlay strip needs at least one frame")
    if len(frames) != len(preds) or (gts is not None and len(gts) != len(frames)):
        raise ValidationError("frames, preds, and gts must have equal lengths")
    size = min(min(f.shape[0], f.shape[1]) for f in frames)
    drawn = list(preds) + (list(gts) if gts is not None else [])
    scale = auto_scale([np.asarray(a, dtype=np.float64) for a in drawn], size)
    tiles = [
        render_action_overlay(f, p, None if gts is None else gts[i], scale=scale)
        for i, (f, p) in enumerate(zip(frames, preds))
    ]
    height = max(t.shape[0] for t in tiles)
    width = sum(t.shape[1] for t in tiles) + gap * (len(tiles) - 1)
    strip = np.zeros((height, width, 3), dtype=np.uint8)
    x = 0
    for t in tiles:
        strip[: t.shape[0], x : x + t.shape[1]] = t
        x += t.shape[1] + gap
    return strip
