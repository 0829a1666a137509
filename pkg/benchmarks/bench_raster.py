#!/usr/bin/env python3
"""Benchmark the numba raster kernel against the pure-numpy fallback.

Renders the same seeded frames with both backends, reports per-frame time and
throughput, and verifies the buffers agree. Run from the repo root:

    python benchmarks/bench_raster.py [--size 256] [--frames 20]
"""

import argparse
import time

import numpy as np

from sceneforge.catalog import demo_catalog_path, load_catalog
from sceneforge.config import GenerationConfig
from sceneforge.raster import rasterize_frame, set_backend
from sceneforge.rng import Stream, derive_seed
from sceneforge.sampler import advance_frame, sample_scene, settle_physics


def make_frames(n, size):
    catalog = load_catalog(demo_catalog_path())
    config = GenerationConfig(
        seed=99,
        n_object_range=(4, 8),
        n_human_range=(1, 3),
        frames_per_video=max(n, 1),
        image_size=(size, size),
    )
    frames = []
    v = 0
    while len(frames) < n:
        stream = Stream(derive_seed(99, f"video:{v}"))
        scene = settle_physics(sample_scene(config, catalog, stream, f"v{v}"))
        for t in range(min(n - len(frames), 4)):
            frames.append((advance_frame(scene, t), scene.cameras.cameras[t % len(scene.cameras.cameras)]))
        v += 1
    return frames


def run(backend, frames):
    set_backend(backend)
    rasterize_frame(*frames[0])  # warm up (JIT compile / cache load)
    start = time.perf_counter()
    buffers = [rasterize_frame(f, c) for f, c in frames]
    elapsed = time.perf_counter() - start
    return elapsed, buffers


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=128)
    parser.add_argument("--frames", type=int, default=20)
    args = parser.parse_args()

    frames = make_frames(args.frames, args.size)
    px = args.size * args.size * len(frames)

    t_np, buf_np = run("numpy", frames)
    t_nb, buf_nb = run("numba", frames)

    print(f"{len(frames)} frames at {args.size}x{args.size}")
    print(f"numpy : {t_np:.3f} s  ({t_np / len(frames) * 1e3:6.2f} ms/frame, {px / t_np / 1e6:6.1f} Mpix/s)")
    print(f"numba : {t_nb:.3f} s  ({t_nb / len(frames) * 1e3:6.2f} ms/frame, {px / t_nb / 1e6:6.1f} Mpix/s)")
    print(f"speedup: {t_np / t_nb:.2f}x")

    masks_equal = all(
        np.array_equal(a.instance_mask, b.instance_mask) for a, b in zip(buf_np, buf_nb)
    )
    depth_close = all(
        np.allclose(a.depth, b.depth, rtol=1e-6, equal_nan=False)
        or np.array_equal(a.depth, b.depth)
        for a, b in zip(buf_np, buf_nb)
    )
    print(f"backend agreement: masks {'OK' if masks_equal else 'MISMATCH'}, "
          f"depth {'OK' if depth_close else 'MISMATCH'}")
    return 0 if (masks_equal and depth_close) else 1


if __name__ == "__main__":
    raise SystemExit(main())
