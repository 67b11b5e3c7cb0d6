"""Shared fixtures and volume factories for the test suite.

Random volumes come in three flavors: continuous (all values distinct
with probability 1), integer-valued (deliberate ties), and binary.
Matching tests need a dominating pair, so `random_pair` returns
(I, min(I, J)) which satisfies I >= C pointwise by construction.
"""

import numpy as np
import pytest

from bettimatch.volume_io import SUBLEVEL, SUPERLEVEL, VoxelGrid


def continuous_volume(rng, shape):
    return rng.random(shape)


def integer_volume(rng, shape, levels=4):
    return rng.integers(0, levels, size=shape).astype(np.float64)


def binary_volume(rng, shape, p=0.5):
    return (rng.random(shape) < p).astype(np.float64)


def random_pair(rng, shape, maker=continuous_volume):
    """A (prediction-like, comparison) pair with I >= C pointwise."""
    a = maker(rng, shape)
    b = maker(rng, shape)
    return a, np.minimum(a, b)


def grids(values_i, values_j, mode=SUBLEVEL):
    return VoxelGrid(values_i, mode), VoxelGrid(values_j, mode)


def betti_numbers_at(bc, threshold=0.5):
    """Count bars alive at the threshold, direction-aware."""
    sign = -1 if bc.filtration_mode == SUPERLEVEL else 1
    out = []
    for d in (0, 1, 2):
        alive = 0
        for bar in bc.finite.get(d, []):
            if sign * bar.birth < sign * threshold < sign * bar.death:
                alive += 1
        for bar in bc.essential.get(d, []):
            if sign * bar.birth < sign * threshold:
                alive += 1
        out.append(alive)
    return tuple(out)


SMALL_SHAPES = [(4, 4, 4), (5, 5, 5), (3, 4, 5)]
DEGENERATE_SHAPES = [(1, 1, 1), (6, 1, 1), (1, 5, 1), (5, 6, 1), (1, 4, 4), (2, 2, 2)]
BOTH_MODES = [SUBLEVEL, SUPERLEVEL]


@pytest.fixture
def rng():
    return np.random.default_rng(0xBE77)
