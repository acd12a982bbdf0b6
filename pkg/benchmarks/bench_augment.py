"""Throughput benchmark: compiled warp kernel vs the pure-numpy fallback.

Runs the bilinear crop/rotate warp that dominates augmentation cost on a
batch of synthetic frames and reports per-backend throughput plus the
speedup ratio. The two backends are also checked against each other so a
speedup never comes from drifting output.

Usage:
    python benchmarks/bench_augment.py [--frames N] [--size S] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from playbc.datasets.kernels import BACKEND, numpy_warp_affine, warp_affine


def make_frames(n: int, size: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(n, size, size, 3), dtype=np.uint8).astype(np.float32) / 255.0


def warp_params(rng: np.random.Generator, size: int) -> tuple[float, float, float, float, float]:
    scale = rng.uniform(0.7, 1.0)
    half = size * scale / 2.0
    cx = rng.uniform(half, size - half)
    cy = rng.uniform(half, size - half)
    angle = rng.uniform(-0.3, 0.3)
    return cx, cy, half, half, angle


def bench(fn, frames: np.ndarray, out_size: int, repeats: int) -> float:
    """Return best-of-`repeats` throughput in frames/second."""
    rng = np.random.default_rng(123)
    params = [warp_params(rng, frames.shape[1]) for _ in range(len(frames))]
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for img, (cx, cy, hh, hw, ang) in zip(frames, params):
            fn(img, out_size, out_size, cx, cy, hh, hw, ang)
        best = min(best, time.perf_counter() - t0)
    return len(frames) / best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=256, help="frames per timed pass")
    ap.add_argument("--size", type=int, default=64, help="square frame edge in pixels")
    ap.add_argument("--out-size", type=int, default=None, help="warp output edge (default: same as --size)")
    ap.add_argument("--repeats", type=int, default=5, help="timed passes; best is reported")
    args = ap.parse_args()
    out_size = args.out_size or args.size

    frames = make_frames(args.frames, args.size)

    # parity first: identical inputs must give near-identical outputs
    rng = np.random.default_rng(7)
    cx, cy, hh, hw, ang = warp_params(rng, args.size)
    a = warp_affine(frames[0], out_size, out_size, cx, cy, hh, hw, ang)
    b = numpy_warp_affine(frames[0], out_size, out_size, cx, cy, hh, hw, ang)
    max_diff = float(np.max(np.abs(a.astype(np.float64) - b.astype(np.float64))))
    print(f"active backend: {BACKEND}")
    print(f"backend parity max |diff|: {max_diff:.3e}")
    if max_diff > 1e-5:
        raise SystemExit("backends disagree; benchmark aborted")

    fps_numpy = bench(numpy_warp_affine, frames, out_size, args.repeats)
    print(f"numpy  : {fps_numpy:10.1f} frames/s")
    if BACKEND == "cython":
        fps_cython = bench(warp_affine, frames, out_size, args.repeats)
        print(f"cython : {fps_cython:10.1f} frames/s")
        print(f"speedup: {fps_cython / fps_numpy:.2f}x")
    else:
        print("compiled kernel unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()
