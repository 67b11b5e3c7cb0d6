import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from bettimatch.grid import (
    Cube,
    GridComplex,
    OUTSIDE_VERTEX,
    OutOfBoundsError,
    cube_is_older,
    cube_order_key,
    pack_index,
    unpack_index,
)

from conftest import DEGENERATE_SHAPES, SMALL_SHAPES

coords = st.integers(min_value=0, max_value=(1 << 20) - 1)
types = st.integers(min_value=0, max_value=15)


@given(x=coords, y=coords, z=coords, t=types)
def test_pack_unpack_roundtrip(x, y, z, t):
    assert unpack_index(pack_index(x, y, z, t)) == (x, y, z, t)


@given(a=st.tuples(coords, coords, coords, types), b=st.tuples(coords, coords, coords, types))
def test_packing_is_lexicographic(a, b):
    """Packed indices sort exactly like (x, y, z, type) tuples."""
    assert (pack_index(*a) < pack_index(*b)) == (a < b)


def test_cube_order_birth_before_index():
    early = Cube.from_coords(0.5, 9, 9, 9, 2)
    late = Cube.from_coords(0.7, 0, 0, 0, 0)
    assert cube_order_key(early) < cube_order_key(late)
    assert cube_is_older(early, late)
    tie_a = Cube.from_coords(0.7, 0, 0, 1, 0)
    assert cube_order_key(late) < cube_order_key(tie_a)


def test_outside_vertex_is_youngest():
    assert OUTSIDE_VERTEX.is_outside
    assert math.isinf(OUTSIDE_VERTEX.birth)
    anything = Cube.from_coords(1e300, (1 << 20) - 1, 0, 0, 0)
    assert cube_order_key(anything) < cube_order_key(OUTSIDE_VERTEX)


# -- cell tables --------------------------------------------------------------


def brute_force_cells(cx, dim):
    """Enumerate (x, y, z, type) of every dim-cube straight from the definition."""
    n1, n2, n3 = cx.shape
    spans_by_type = {
        1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        2: [(0, 1, 1), (1, 0, 1), (1, 1, 0)],
    }
    if dim == 0:
        return [(x, y, z, 0) for x in range(n1) for y in range(n2) for z in range(n3)]
    if dim == 3:
        spans = [(1, 1, 1)]
    else:
        spans = spans_by_type[dim]
    out = []
    for t, (sx, sy, sz) in enumerate(spans):
        for x in range(n1 - sx):
            for y in range(n2 - sy):
                for z in range(n3 - sz):
                    out.append((x, y, z, t if dim != 3 else 0))
    return out


@pytest.mark.parametrize("shape", SMALL_SHAPES + DEGENERATE_SHAPES)
def test_cell_counts_match_enumeration(shape, rng):
    cx = GridComplex(rng.random(shape))
    for dim in range(4):
        assert cx.cell_count(dim) == len(brute_force_cells(cx, dim))


@pytest.mark.parametrize("shape", [(3, 3, 3), (4, 3, 2), (2, 5, 1)])
def test_filtration_value_is_vertex_max(shape, rng):
    values = rng.random(shape)
    cx = GridComplex(values)
    for dim in range(4):
        for x, y, z, t in brute_force_cells(cx, dim):
            cube = cx.make_cube(x, y, z, t, dim)
            expected = max(values[v] for v in cx.vertices_of(cube, dim))
            assert cube.birth == expected


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_facets_are_vertex_subsets(dim, rng):
    """Each facet's voxels lie inside the cube's voxels and halve their count."""
    cx = GridComplex(rng.random((4, 4, 4)))
    for x, y, z, t in brute_force_cells(cx, dim):
        cube = cx.make_cube(x, y, z, t, dim)
        verts = set(cx.vertices_of(cube, dim))
        facets = list(cx.enumerate_boundary(cube, dim))
        assert len(facets) == 2 * dim
        packed = [f.packed for f in facets]
        assert packed == sorted(packed)
        union = set()
        for f in facets:
            fverts = set(cx.vertices_of(f, dim - 1))
            assert len(fverts) == 2 ** (dim - 1)
            assert fverts <= verts
            union |= fverts
        assert union == verts


@pytest.mark.parametrize("dim", [2, 3])
def test_boundary_of_boundary_vanishes_mod_2(dim, rng):
    cx = GridComplex(rng.random((4, 4, 4)))
    for x, y, z, t in brute_force_cells(cx, dim):
        cube = cx.make_cube(x, y, z, t, dim)
        seen = {}
        for facet in cx.enumerate_boundary(cube, dim):
            for edge in cx.enumerate_boundary(facet, dim - 1):
                seen[edge.packed] = seen.get(edge.packed, 0) + 1
        assert all(count == 2 for count in seen.values())


def test_dual_edges_cover_every_face(rng):
    cx = GridComplex(rng.random((4, 3, 3)))
    n1, n2, n3 = cx.shape
    seen = set()
    outside = 0
    for face, (u, v) in cx.enumerate_dual_edges():
        seen.add(face.packed)
        assert face.birth == cx.filtration_value(*face.coords, face.type, dim=2)
        for w in (u, v):
            if w.is_outside:
                outside += 1
            else:
                assert set(cx.vertices_of(face, 2)) <= set(cx.vertices_of(w, 3))
    assert len(seen) == cx.cell_count(2)
    hull = 2 * ((n1 - 1) * (n2 - 1) + (n2 - 1) * (n3 - 1) + (n1 - 1) * (n3 - 1))
    assert outside == hull


# -- ordering -----------------------------------------------------------------


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("binary", [False, True])
def test_partition_sort_equals_stable_argsort(dim, binary, rng):
    values = (rng.random((5, 4, 6)) < 0.4).astype(float) if binary else rng.random((5, 4, 6))
    cx = GridComplex(values)
    fast = cx.sorted_order(dim, partition_sort=True)
    plain = cx.sorted_order(dim, partition_sort=False)
    assert np.array_equal(fast, plain)
    _, _, births = cx._cell_table(dim)
    assert np.array_equal(plain, np.argsort(births, kind="stable"))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31), levels=st.integers(min_value=1, max_value=3))
def test_sorted_columns_obey_refined_order(seed, levels):
    values = np.random.default_rng(seed).integers(0, levels, size=(4, 4, 3)).astype(float)
    cx = GridComplex(values)
    cubes = cx.enumerate_sorted_columns(2)
    keys = [cube_order_key(c) for c in cubes]
    assert keys == sorted(keys)


def test_out_of_bounds_rejected(rng):
    cx = GridComplex(rng.random((3, 3, 3)))
    with pytest.raises(OutOfBoundsError):
        cx.filtration_value(3, 0, 0, 0, dim=0)
    with pytest.raises(OutOfBoundsError):
        cx.filtration_value(2, 0, 0, 0, dim=1)  # x-edge needs x+1 in range
    with pytest.raises(OutOfBoundsError):
        cx.filtration_value(0, 0, 0, 3, dim=1)


@pytest.mark.parametrize(
    "shape,rank",
    [((1, 1, 1), 0), ((5, 1, 1), 1), ((1, 1, 7), 1), ((4, 5, 1), 2), ((1, 3, 3), 2), ((2, 2, 2), 3)],
)
def test_rank_counts_extended_axes(shape, rank):
    assert GridComplex(np.zeros(shape)).rank == rank
