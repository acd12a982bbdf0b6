"""Pure-numpy fallback for the fused crop/rotate/resize warp kernel.

Coordinate math runs in float64, interpolation in float32, mirroring the
compiled kernel so both backends agree to float32 precision. Output pixel
(i, j) maps into the source through a square window of half-extents
(half_h, half_w) centered at (cx, cy), rotated by angle_rad; samples are
bilinear with edge clamping (half-pixel-center convention, matching a
standard align_corners=False resize when the window spans the full image).
"""

from __future__ import annotations

import numpy as np


def warp_affine(
    img: np.ndarray,
    out_h: int,
    out_w: int,
    cx: float,
    cy: float,
    half_h: float,
    half_w: float,
    angle_rad: float,
) -> np.ndarray:
    h, w = img.shape[:2]
    u = (np.arange(out_w, dtype=np.float64) + 0.5) / out_w * 2.0 - 1.0
    v = (np.arange(out_h, dtype=np.float64) + 0.5) / out_h * 2.0 - 1.0
    dx = u[None, :] * half_w
    dy = v[:, None] * half_h
    ca, sa = np.cos(angle_rad), np.sin(angle_rad)
    x = cx + ca * dx - sa * dy - 0.5
    y = cy + sa * dx + ca * dy - 0.5

    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = (x - x0).astype(np.float32)[..., None]
    fy = (y - y0).astype(np.float32)[..., None]
    ix0 = np.clip(x0, 0, w - 1).astype(np.intp)
    ix1 = np.clip(x0 + 1, 0, w - 1).astype(np.intp)
    iy0 = np.clip(y0, 0, h - 1).astype(np.intp)
    iy1 = np.clip(y0 + 1, 0, h - 1).astype(np.intp)

    img = np.ascontiguousarray(img, dtype=np.float32)
    p00 = img[iy0, ix0]
    p01 = img[iy0, ix1]
    p10 = img[iy1, ix0]
    p11 = img[iy1, ix1]

    one = np.float32(1.0)
    top = (one - fx) * p00 + fx * p01
    bot = (one - fx) * p10 + fx * p11
    return (one - fy) * top + fy * bot
