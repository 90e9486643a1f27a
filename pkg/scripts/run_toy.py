#!/usr/bin/env python3
"""Run the built-in two-block benchmark and print its headline diagnostics.

Usage: python scripts/run_toy.py [seed]

The benchmark plants one shared component plus one (block x) and two
(block y) individual components at wildly different scales; the run prints
the quantities worth eyeballing after any change to the pipeline.
"""

import sys
import time

import numpy as np

from nijive import PipelineConfig, generate_toy, run_pipeline, two_block_angle_threshold


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    t0 = time.perf_counter()
    blocks, _ = generate_toy(seed)
    config = PipelineConfig(initial_ranks=(2, 3))
    result = run_pipeline(blocks, config)
    elapsed = time.perf_counter() - t0

    seg = result.segmentation
    dec = result.decomposition
    print(f"benchmark seed {seed}, {elapsed:.1f} s")
    for block, est in zip(result.blocks, result.estimates):
        top = ", ".join(f"{s:.4g}" for s in est.full_spectrum[: est.rank + 2])
        print(f"  {block.name}: rank {est.rank}, leading spectrum {top}, ...")
    phi = seg.principal_angles_deg
    print(f"  principal angles: {phi[0]:.2f} deg, {phi[1]:.2f} deg")
    angle_bound, angle_ci = two_block_angle_threshold(list(result.bounds), config)
    print(
        f"  resampled angle bound: median {angle_bound:.2f} deg, "
        f"one-sided CI ends {angle_ci[0]:.2f} / {angle_ci[1]:.2f} deg"
    )
    sq = np.round(seg.squared_singular_values[:3], 4)
    print(f"  stacked squared singular values: {sq}")
    print(
        f"  sv threshold {seg.threshold:.4f} "
        f"(CI ends {seg.threshold_ci[0]:.4f} / {seg.threshold_ci[1]:.4f})"
    )
    print(f"  joint rank {dec.joint_rank}, individual ranks {dec.individual_ranks}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
