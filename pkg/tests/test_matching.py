"""Matching assembly against the oracle, plus its structural laws."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from bettimatch.config import EngineConfig
from bettimatch.image import ShapeMismatch
from bettimatch.matching import compute_betti_matching, comparison_volume
from bettimatch.oracle import oracle_betti_matching
from bettimatch.serialize import dumps_canonical, matching_to_dict
from bettimatch.volume_io import SUBLEVEL, SUPERLEVEL, VoxelGrid

from conftest import BOTH_MODES, binary_volume, continuous_volume, integer_volume


def assert_matching_matches_oracle(grid_i, grid_j, extended=True, config=None):
    res = compute_betti_matching(grid_i, grid_j, config=config, include_reverse_pairs=extended)
    matched, unmatched_a, unmatched_b = oracle_betti_matching(
        grid_i, grid_j, extended=extended
    )
    for d in (0, 1, 2):
        mine = sorted(
            ((p.bar_i.birth, p.bar_i.death), (p.bar_j.birth, p.bar_j.death))
            for p in res.matched[d]
        )
        theirs = sorted(((a.birth, a.death), (b.birth, b.death)) for a, b in matched[d])
        assert mine == theirs, f"dim {d} matched"
        for side, bars, oracle_side in (("i", res.unmatched_i, unmatched_a), ("j", res.unmatched_j, unmatched_b)):
            assert sorted((b.birth, b.death) for b in bars[d]) == sorted(
                (p.birth, p.death) for p in oracle_side[d]
            ), f"dim {d} unmatched {side}"
    return res


@pytest.mark.parametrize("mode", BOTH_MODES)
@pytest.mark.parametrize("extended", [True, False])
def test_matching_matches_oracle(mode, extended, rng):
    for maker in (continuous_volume, integer_volume, binary_volume):
        a = maker(rng, (5, 5, 5))
        b = maker(rng, (5, 5, 5))
        assert_matching_matches_oracle(VoxelGrid(a, mode), VoxelGrid(b, mode), extended)


@pytest.mark.parametrize("shape", [(6, 6, 1), (8, 1, 1), (2, 3, 4)])
def test_matching_on_low_rank_grids(shape, rng):
    a, b = continuous_volume(rng, shape), continuous_volume(rng, shape)
    assert_matching_matches_oracle(VoxelGrid(a), VoxelGrid(b))


def test_self_match_is_perfect_and_lossless(rng):
    grid = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    res = compute_betti_matching(grid, grid)
    for d in (0, 1, 2):
        assert res.unmatched_i[d] == [] and res.unmatched_j[d] == []
        for p in res.matched[d]:
            assert (p.bar_i.birth, p.bar_i.death) == (p.bar_j.birth, p.bar_j.death)
        assert len(res.essential_i[d]) == len(res.essential_j[d])


def test_swapped_inputs_transpose_the_result(rng):
    a = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    b = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    fwd = compute_betti_matching(a, b)
    rev = compute_betti_matching(b, a)
    for d in (0, 1, 2):
        fwd_pairs = sorted(
            ((p.bar_i.birth, p.bar_i.death), (p.bar_j.birth, p.bar_j.death)) for p in fwd.matched[d]
        )
        rev_pairs = sorted(
            ((p.bar_j.birth, p.bar_j.death), (p.bar_i.birth, p.bar_i.death)) for p in rev.matched[d]
        )
        assert fwd_pairs == rev_pairs
        assert [(x.birth, x.death) for x in fwd.unmatched_i[d]] == [
            (x.birth, x.death) for x in rev.unmatched_j[d]
        ]


def test_strict_anchoring_never_matches_more(rng):
    for _ in range(3):
        a = VoxelGrid(integer_volume(rng, (6, 6, 6), levels=3))
        b = VoxelGrid(integer_volume(rng, (6, 6, 6), levels=3))
        ext = compute_betti_matching(a, b, include_reverse_pairs=True)
        strict = compute_betti_matching(a, b, include_reverse_pairs=False)
        for d in (0, 1, 2):
            ext_keys = {
                (p.bar_i.birth_cube.packed, p.bar_j.birth_cube.packed) for p in ext.matched[d]
            }
            strict_keys = {
                (p.bar_i.birth_cube.packed, p.bar_j.birth_cube.packed) for p in strict.matched[d]
            }
            assert strict_keys <= ext_keys


def test_matched_bars_never_reappear_unmatched(rng):
    a = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    b = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    res = compute_betti_matching(a, b)
    for d in (0, 1, 2):
        matched_i = {p.bar_i.birth_cube.packed for p in res.matched[d]}
        matched_j = {p.bar_j.birth_cube.packed for p in res.matched[d]}
        assert len(matched_i) == len(res.matched[d])  # claims are unique
        assert len(matched_j) == len(res.matched[d])
        assert matched_i.isdisjoint(x.birth_cube.packed for x in res.unmatched_i[d])
        assert matched_j.isdisjoint(x.birth_cube.packed for x in res.unmatched_j[d])


def test_strict_matches_always_overlap(rng):
    """With strict anchors, a <= b < c <= d on both sides forces every
    matched pair of bars to overlap: each birth precedes both deaths.
    (The full inequality, with the comparison interval's endpoints, is
    exercised in the acceptance suite.)"""
    for _ in range(5):
        a = VoxelGrid(integer_volume(rng, (5, 5, 5), levels=4))
        b = VoxelGrid(integer_volume(rng, (5, 5, 5), levels=4))
        res = compute_betti_matching(a, b, include_reverse_pairs=False)
        for d in (0, 1, 2):
            for p in res.matched[d]:
                assert p.bar_i.birth < p.bar_i.death
                assert p.bar_j.birth < p.bar_j.death
                assert p.bar_i.birth < p.bar_j.death
                assert p.bar_j.birth < p.bar_i.death


def test_flag_toggles_never_change_the_matching(rng):
    grid_i = VoxelGrid(integer_volume(rng, (6, 6, 6), levels=3))
    grid_j = VoxelGrid(integer_volume(rng, (6, 6, 6), levels=3))
    reference = dumps_canonical(matching_to_dict(compute_betti_matching(grid_i, grid_j)))
    flags = [
        "emergent_pairs",
        "clearing",
        "comparison_clearing",
        "joint_unionfind",
        "cache_as_list",
        "partition_sort",
        "parallel",
    ]
    for flag in flags:
        cfg = EngineConfig(**{flag: False})
        body = dumps_canonical(matching_to_dict(compute_betti_matching(grid_i, grid_j, config=cfg)))
        assert body == reference, flag
    body = dumps_canonical(
        matching_to_dict(compute_betti_matching(grid_i, grid_j, config=EngineConfig.all_off()))
    )
    assert body == reference


def test_parallel_runs_are_byte_identical(rng):
    grid_i = VoxelGrid(continuous_volume(rng, (8, 8, 8)))
    grid_j = VoxelGrid(continuous_volume(rng, (8, 8, 8)))
    cfg = EngineConfig(parallel=True, threads=5)
    first = dumps_canonical(matching_to_dict(compute_betti_matching(grid_i, grid_j, config=cfg)))
    second = dumps_canonical(matching_to_dict(compute_betti_matching(grid_i, grid_j, config=cfg)))
    assert first == second


def test_comparison_volume_direction(rng):
    a = continuous_volume(rng, (4, 4, 4))
    b = continuous_volume(rng, (4, 4, 4))
    sub = comparison_volume(VoxelGrid(a), VoxelGrid(b))
    assert np.array_equal(sub.values, np.minimum(a, b))
    sup = comparison_volume(VoxelGrid(a, SUPERLEVEL), VoxelGrid(b, SUPERLEVEL))
    assert np.array_equal(sup.values, np.maximum(a, b))


def test_mismatched_inputs_rejected(rng):
    a = VoxelGrid(continuous_volume(rng, (4, 4, 4)))
    with pytest.raises(ShapeMismatch):
        compute_betti_matching(a, VoxelGrid(continuous_volume(rng, (5, 4, 4))))
    with pytest.raises(ValueError):
        compute_betti_matching(a, VoxelGrid(a.values, SUPERLEVEL))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_matching_oracle_property(seed):
    rng = np.random.default_rng(seed)
    a = VoxelGrid(rng.integers(0, 3, size=(4, 4, 4)).astype(np.float64))
    b = VoxelGrid(rng.integers(0, 3, size=(4, 4, 4)).astype(np.float64))
    assert_matching_matches_oracle(a, b)
