"""Deterministic per-item augmentation: color jitter, random crop, rotation.

Every random draw comes from a counter-based generator keyed by
(seed, trajectory id, frame index, branch tag), so an augmented item is a
pure function of its stream key: prefetch workers, batch order, and process
restarts cannot change results. The two sides of a temporal pair use
distinct branch tags and therefore independent draws.

Draw order per item is fixed: jitter factors (brightness, contrast,
saturation), then crop (area scale, center x, center y), then rotation
angle. Disabled transforms draw nothing, so toggling a flag re-keys the
remaining draws.
"""

from __future__ import annotations

import hashlib
import json
import logging

import numpy as np

from playbc.datasets.kernels import warp_affine
from playbc.datasets.types import AugmentConfig

log = logging.getLogger(__name__)

StreamKey = tuple[int, str, int, str]

_GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float32)


def stream_rng(key: StreamKey) -> np.random.Generator:
    """Philox generator keyed by a blake2b hash of the stream key.

    The key is JSON-encoded before hashing so that no choice of trajectory
    id can collide with another key (plain string joins are ambiguous).
    """
    seed, traj_id, frame_index, branch = key
    material = json.dumps([seed, traj_id, frame_index, branch], separators=(",", ":"))
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=16).digest()
    return np.random.Generator(np.random.Philox(key=np.frombuffer(digest, dtype=np.uint64)))


def resize_frame(frame: np.ndarray, size: int) -> np.ndarray:
    """Plain bilinear resize to (size, size); the no-augmentation path."""
    h, w = frame.shape[:2]
    frame = np.ascontiguousarray(frame, dtype=np.float32)
    return warp_affine(frame, size, size, w / 2.0, h / 2.0, h / 2.0, w / 2.0, 0.0)


def _jitter_factor(rng: np.random.Generator, strength: float) -> float:
    return float(rng.uniform(max(0.0, 1.0 - strength), 1.0 + strength))


def _grayscale(img: np.ndarray) -> np.ndarray:
    return img @ _GRAY_WEIGHTS


def apply_color_jitter(img: np.ndarray, fb: float, fc: float, fs: float) -> np.ndarray:
    """Brightness/contrast/saturation by factor interpolation, then clamp."""
    out = img * np.float32(fb)
    if fc != 1.0:
        m = _grayscale(out).mean(dtype=np.float32)
        out = (out - m) * np.float32(fc) + m
    if fs != 1.0:
        g = _grayscale(out)[..., None]
        out = g + (out - g) * np.float32(fs)
    return np.clip(out, 0.0, 1.0)


def augment_frame(frame: np.ndarray, cfg: AugmentConfig, key: StreamKey) -> np.ndarray:
    """Augment one frame; output is (output_size, output_size, 3) in [0, 1]."""
    h, w = frame.shape[:2]
    rng = stream_rng(key)

    fb = fc = fs = 1.0
    if cfg.enable_jitter:
        fb = _jitter_factor(rng, cfg.brightness)
        fc = _jitter_factor(rng, cfg.contrast)
        fs = _jitter_factor(rng, cfg.saturation)

    cx, cy = w / 2.0, h / 2.0
    half = min(h, w) / 2.0
    if cfg.enable_crop:
        scale = float(rng.uniform(cfg.crop_scale[0], cfg.crop_scale[1]))
        side = float(np.sqrt(scale * h * w))
        if side > min(h, w):
            log.warning(
                "degenerate crop: window side %.1f exceeds image min side %d; using full image",
                side,
                min(h, w),
            )
            side = float(min(h, w))
        half = side / 2.0
        cx = float(rng.uniform(half, w - half)) if w - half > half else w / 2.0
        cy = float(rng.uniform(half, h - half)) if h - half > half else h / 2.0

    angle = 0.0
    if cfg.enable_rotation and cfg.rotation_deg > 0.0:
        angle = float(np.deg2rad(rng.uniform(-cfg.rotation_deg, cfg.rotation_deg)))

    frame = np.ascontiguousarray(frame, dtype=np.float32)
    if not (cfg.enable_crop or cfg.enable_rotation):
        out = warp_affine(frame, cfg.output_size, cfg.output_size, w / 2.0, h / 2.0, h / 2.0, w / 2.0, 0.0)
    else:
        out = warp_affine(frame, cfg.output_size, cfg.output_size, cx, cy, half, half, angle)

    if cfg.enable_jitter:
        out = apply_color_jitter(out, fb, fc, fs)
    return out
