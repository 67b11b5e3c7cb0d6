"""Persistence of the inclusion-induced map: engine vs dense reference."""

import numpy as np
import pytest

from bettimatch.image import (
    DominanceViolation,
    FiltrationModeMismatch,
    ShapeMismatch,
    check_compatible,
    compute_image_pairs,
)
from bettimatch.oracle import oracle_image_pairs
from bettimatch.persistence import compute_barcode
from bettimatch.volume_io import SUBLEVEL, SUPERLEVEL, VoxelGrid

from conftest import BOTH_MODES, binary_volume, continuous_volume, integer_volume, random_pair


def assert_image_matches_oracle(grid_in, grid_cmp, extended):
    got = compute_image_pairs(grid_in, grid_cmp, extended=extended)
    want = oracle_image_pairs(grid_in, grid_cmp, extended=extended)
    for d in (0, 1, 2):
        mine = sorted(
            (p.birth, p.death, p.birth_cube.coords + (p.birth_cube.type,),
             p.death_cube.coords + (p.death_cube.type,))
            for p in got[d]
        )
        theirs = sorted((p.birth, p.death, p.birth_cell, p.death_cell) for p in want[d])
        assert mine == theirs, f"dim {d}, extended={extended}"


@pytest.mark.parametrize("mode", BOTH_MODES)
@pytest.mark.parametrize("extended", [True, False])
def test_image_pairs_match_oracle(mode, extended, rng):
    for maker in (continuous_volume, integer_volume, binary_volume):
        a, c = random_pair(rng, (5, 5, 5), maker)
        if mode == SUPERLEVEL:
            # dominance is stated on the filtration: superlevel needs I >= C
            # on the negated values, so the roles swap
            grid_in, grid_cmp = VoxelGrid(c, mode), VoxelGrid(a, mode)
        else:
            grid_in, grid_cmp = VoxelGrid(a, mode), VoxelGrid(c, mode)
        assert_image_matches_oracle(grid_in, grid_cmp, extended)


@pytest.mark.parametrize("shape", [(5, 5, 5), (6, 5, 1), (7, 1, 1)])
def test_identity_inclusion_reproduces_own_pairs(shape, rng):
    """Strict mode is exactly the volume's own barcode; extended mode adds
    only zero-persistence anchors on top (nothing reverse can appear when
    input and comparison coincide)."""
    grid = VoxelGrid(continuous_volume(rng, shape))
    own = compute_barcode(grid)
    for d in (0, 1, 2):
        theirs = sorted((b.birth, b.death, b.birth_cube.packed) for b in own.finite[d])
        strict = compute_image_pairs(grid, grid, extended=False)
        mine = sorted((p.birth, p.death, p.birth_cube.packed) for p in strict[d])
        assert mine == theirs
        extended = compute_image_pairs(grid, grid, extended=True)
        forward = sorted(
            (p.birth, p.death, p.birth_cube.packed) for p in extended[d] if p.birth != p.death
        )
        assert forward == theirs
        assert all(p.birth <= p.death for p in extended[d])


def test_one_dimensional_reverse_pair():
    """A ridge in the input flattened in the comparison: the image barcode
    keeps the merge only as a reverse interval."""
    grid_in = VoxelGrid(np.array([0.0, 1.0, 0.0]))
    grid_cmp = VoxelGrid(np.zeros(3))
    extended = compute_image_pairs(grid_in, grid_cmp, extended=True)
    got = sorted((p.birth, p.death, p.birth_cube.coords) for p in extended[0])
    assert got == [(0.0, 0.0, (2, 0, 0)), (1.0, 0.0, (1, 0, 0))]
    strict = compute_image_pairs(grid_in, grid_cmp, extended=False)
    assert strict[0] == []


def test_strict_is_the_forward_subset_of_extended(rng):
    a, c = random_pair(rng, (5, 5, 5), integer_volume)
    ext = compute_image_pairs(VoxelGrid(a), VoxelGrid(c), extended=True)
    strict = compute_image_pairs(VoxelGrid(a), VoxelGrid(c), extended=False)
    for d in (0, 1, 2):
        ext_keys = {(p.birth_cube.packed, p.death_cube.packed) for p in ext[d]}
        strict_keys = {(p.birth_cube.packed, p.death_cube.packed) for p in strict[d]}
        assert strict_keys <= ext_keys
        assert strict_keys == {
            (p.birth_cube.packed, p.death_cube.packed) for p in ext[d] if p.birth < p.death
        }


def test_compatibility_errors(rng):
    base = VoxelGrid(continuous_volume(rng, (4, 4, 4)))
    with pytest.raises(ShapeMismatch):
        check_compatible(base, VoxelGrid(np.zeros((3, 3, 3))))
    with pytest.raises(FiltrationModeMismatch):
        check_compatible(base, VoxelGrid(base.values, SUPERLEVEL))
    with pytest.raises(DominanceViolation):
        compute_image_pairs(base, VoxelGrid(base.values + 0.5))
    # a comparison below the input is fine
    check_compatible(base, VoxelGrid(base.values - 0.5))


def test_dims_subset(rng):
    a, c = random_pair(rng, (4, 4, 4))
    only1 = compute_image_pairs(VoxelGrid(a), VoxelGrid(c), dims=(1,), extended=True)
    full = compute_image_pairs(VoxelGrid(a), VoxelGrid(c), extended=True)
    assert set(only1) == {1}
    assert [(p.birth, p.death) for p in only1[1]] == [(p.birth, p.death) for p in full[1]]
