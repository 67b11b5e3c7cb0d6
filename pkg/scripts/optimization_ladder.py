#!/usr/bin/env python3
"""Measure what each engine optimization buys on a matching workload.

Runs the full matching once per configuration: everything on, then each
optimization disabled in isolation, then everything off.  Every run is
checked byte-for-byte against the all-on result before its timing is
trusted, so the table doubles as an equivalence sweep.

    python3 scripts/optimization_ladder.py --size 48 --repeat 3
    python3 scripts/optimization_ladder.py a.npy b.npy --repeat 5
"""

import argparse
import statistics
import sys
import time

import numpy as np

from bettimatch.config import EngineConfig
from bettimatch.matching import compute_betti_matching
from bettimatch.serialize import dumps_canonical, matching_to_dict
from bettimatch.synthetic import smoothed_noise
from bettimatch.volume_io import VoxelGrid

FLAGS = [
    "emergent_pairs",
    "clearing",
    "comparison_clearing",
    "joint_unionfind",
    "cache_as_list",
    "partition_sort",
    "parallel",
]


def time_config(grid_i, grid_j, config, repeat):
    samples = []
    body = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = compute_betti_matching(grid_i, grid_j, config=config)
        samples.append(time.perf_counter() - t0)
        body = dumps_canonical(matching_to_dict(result))
    return samples, body


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("volumes", nargs="*", help="two .npy volumes (else synthetic noise)")
    parser.add_argument("--size", type=int, default=48, help="synthetic volume side length")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    if args.volumes:
        if len(args.volumes) != 2:
            parser.error("expected exactly two volumes")
        vi, vj = (np.load(p) for p in args.volumes)
    else:
        vi = smoothed_noise(args.size, seed=1)
        vj = smoothed_noise(args.size, seed=2)
    grid_i, grid_j = VoxelGrid(vi), VoxelGrid(vj)
    print(f"matching {vi.shape} vs {vj.shape}, {args.repeat} repetitions per row")

    ladder = [("all on", EngineConfig(threads=args.threads))]
    ladder += [
        (f"no {flag}", EngineConfig(threads=args.threads, **{flag: False}))
        for flag in FLAGS
    ]
    ladder.append(("all off", EngineConfig.all_off()))

    reference = None
    print(f"{'configuration':<24}{'mean [s]':>10}{'stddev':>10}{'vs all-on':>11}")
    base_mean = None
    for label, config in ladder:
        samples, body = time_config(grid_i, grid_j, config, args.repeat)
        if reference is None:
            reference = body
        elif body != reference:
            print(f"{label}: RESULT MISMATCH", file=sys.stderr)
            return 3
        mean = statistics.mean(samples)
        stddev = statistics.stdev(samples) if len(samples) > 1 else 0.0
        if base_mean is None:
            base_mean = mean
        print(f"{label:<24}{mean:>10.3f}{stddev:>10.3f}{mean / base_mean:>10.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
