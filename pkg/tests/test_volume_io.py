import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from bettimatch.volume_io import (
    ParseError,
    ShapeError,
    SUBLEVEL,
    SUPERLEVEL,
    VoxelGrid,
    internal_values,
    load_volume,
    save_volume,
    to_sublevel,
)


def test_low_rank_volumes_pad_to_three_axes():
    assert VoxelGrid(np.zeros(4)).shape == (4, 1, 1)
    assert VoxelGrid(np.zeros((4, 5))).shape == (4, 5, 1)
    assert VoxelGrid(np.zeros((4, 5, 6))).shape == (4, 5, 6)


def test_values_become_float64_c_order():
    raw = np.asfortranarray(np.arange(24, dtype=np.int32).reshape(2, 3, 4))
    grid = VoxelGrid(raw)
    assert grid.values.dtype == np.float64
    assert grid.values.flags["C_CONTIGUOUS"]
    assert np.array_equal(grid.values, raw.astype(np.float64))


def test_rejects_bad_volumes():
    with pytest.raises(ShapeError):
        VoxelGrid(np.zeros((2, 2, 2, 2)))
    with pytest.raises(ShapeError):
        VoxelGrid(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        VoxelGrid(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        VoxelGrid(np.array([1.0, np.inf]))
    with pytest.raises(ValueError):
        VoxelGrid(np.zeros(3), "uplevel")


def test_npy_roundtrip(tmp_path, rng):
    grid = VoxelGrid(rng.random((3, 4, 5)), SUPERLEVEL)
    save_volume(grid, tmp_path / "vol.npy")
    back = load_volume(tmp_path / "vol.npy", filtration_mode=SUPERLEVEL)
    assert back == grid


def test_raw_roundtrip(tmp_path, rng):
    values = rng.random((4, 2, 3)).astype(np.float32)
    values.tofile(tmp_path / "vol.raw")
    grid = load_volume(tmp_path / "vol.raw", format="raw", shape=(4, 2, 3), dtype="float32")
    assert np.array_equal(grid.values, values.astype(np.float64))


def test_raw_needs_shape_and_matching_size(tmp_path):
    np.zeros(7).tofile(tmp_path / "seven.raw")
    with pytest.raises(ShapeError):
        load_volume(tmp_path / "seven.raw", format="raw")
    with pytest.raises(ParseError):
        load_volume(tmp_path / "seven.raw", format="raw", shape=(2, 2, 2))


def test_npy_parse_failures(tmp_path):
    with pytest.raises(ParseError):
        load_volume(tmp_path / "absent.npy")
    bad = tmp_path / "bad.npy"
    bad.write_bytes(b"\x00" * 16)
    with pytest.raises(ParseError):
        load_volume(bad)


@given(seed=st.integers(min_value=0, max_value=2**31), start_super=st.booleans())
def test_to_sublevel_is_an_involution(seed, start_super):
    values = np.random.default_rng(seed).random((3, 3, 3))
    grid = VoxelGrid(values, SUPERLEVEL if start_super else SUBLEVEL)
    flipped = to_sublevel(grid)
    assert flipped.filtration_mode != grid.filtration_mode
    assert to_sublevel(flipped) == grid


def test_internal_values_orientation(rng):
    values = rng.random((3, 3, 3))
    assert internal_values(VoxelGrid(values, SUBLEVEL)) is not None
    assert np.array_equal(internal_values(VoxelGrid(values, SUBLEVEL)), values)
    assert np.array_equal(internal_values(VoxelGrid(values, SUPERLEVEL)), -values)
