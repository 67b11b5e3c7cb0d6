#!/usr/bin/env python3
"""Generate test volumes as .npy files.

The analytic shapes carry known Betti numbers when thresholded at 0.5
(superlevel), which makes them handy fixtures for eyeballing CLI output:

    python3 scripts/make_volume.py torus -n 32 -o torus.npy
    betti barcode torus.npy --timings

`noise` produces the smoothed continuous volumes used for benchmarking.
"""

import argparse
import sys

import numpy as np

from bettimatch import synthetic

SHAPES = {
    "ball": synthetic.ball,
    "shell": synthetic.shell,
    "torus": synthetic.torus,
    "torus-shell": synthetic.torus_shell,
    "two-balls": synthetic.two_balls,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=sorted(SHAPES) + ["noise"])
    parser.add_argument("-n", "--size", type=int, default=32, help="cube side length")
    parser.add_argument("-o", "--output", required=True, help="output .npy path")
    parser.add_argument("--seed", type=int, default=0, help="noise seed")
    parser.add_argument("--passes", type=int, default=2, help="noise smoothing passes")
    args = parser.parse_args(argv)

    if args.kind == "noise":
        volume = synthetic.smoothed_noise(args.size, seed=args.seed, passes=args.passes)
    else:
        volume = SHAPES[args.kind](args.size)
    np.save(args.output, volume)
    print(f"wrote {args.output}: shape {volume.shape}, dtype {volume.dtype}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
