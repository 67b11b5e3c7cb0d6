"""Persistent homology of voxel grids.

The heavy lifting happens in `_kernels`; this module prepares the sorted
cell tables, runs the engine ladder for the grid's rank, and turns flat
ids back into cubes and bars.

Engine ladder by rank (number of non-unit axes):

  rank 3   dim 2 as a union-find over the dual graph (3-cubes plus one
           outside vertex), dim 1 by implicit column reduction, dim 0 as
           a union-find over vertices.
  rank 2   dim 1 as a union-find over the in-plane dual graph, dim 0 as
           above.  No 2-cycles exist, so dim 2 is empty.
  rank <2  dim 0 only.

With clearing enabled each stage hands the next one the list of cells
that can still be destroyers; the skipped cells are exactly the creators
found by the previous stage, whose columns would reduce to zero.

Everything below `compute_barcode` works in sublevel orientation on
internal values; `compute_barcode` itself maps results back to original
units for superlevel grids.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import EngineConfig
from .grid import Cube, GridComplex, cube_order_key
from .reduction import EMPTY, ReductionState
from .volume_io import VoxelGrid, SUPERLEVEL, internal_values


@dataclass(frozen=True)
class PersistencePair:
    """One finite (birth cube, death cube) pair, internal orientation."""

    dim: int
    birth_cube: Cube
    death_cube: Cube

    @property
    def birth(self) -> float:
        return self.birth_cube.birth

    @property
    def death(self) -> float:
        return self.death_cube.birth


@dataclass(frozen=True)
class Bar:
    """One interval in original units.

    ``death_cube`` is None for essential bars; their death is +inf for
    sublevel grids and -inf for superlevel ones.
    """

    dim: int
    birth: float
    death: float
    birth_cube: Cube
    death_cube: Cube | None

    @property
    def essential(self) -> bool:
        return self.death_cube is None


@dataclass
class Barcode:
    shape: tuple[int, int, int]
    filtration_mode: str
    dims: tuple[int, ...]
    finite: dict[int, list[Bar]] = field(default_factory=dict)
    essential: dict[int, list[Bar]] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def n_finite(self, dim: int) -> int:
        return len(self.finite.get(dim, []))

    def n_essential(self, dim: int) -> int:
        return len(self.essential.get(dim, []))


# -- sorted cell tables ------------------------------------------------------


def sorted_cells(cx: GridComplex, dim: int, cfg: EngineConfig):
    """(bases, types, births) of all dim-cells in refined filtration order."""
    bases, types, births = cx._cell_table(dim)
    order = cx.sorted_order(dim, cfg.partition_sort)
    return bases[order], types[order], births[order]


def rank_tables(cx: GridComplex, cfg: EngineConfig):
    """Rank tables for 1-cubes: slot -> rank, rank -> birth, rank -> slot."""
    bases, types, births = cx._cell_table(1)
    order = cx.sorted_order(1, cfg.partition_sort)
    slots = bases * 3 + types
    slots_sorted = slots[order]
    n1, n2, n3 = cx.shape
    rank_of_slot = np.full(n1 * n2 * n3 * 3, EMPTY, dtype=np.int64)
    rank_of_slot[slots_sorted] = np.arange(slots_sorted.size, dtype=np.int64)
    return rank_of_slot, births[order], slots_sorted


def birth_by_slot(cx: GridComplex, dim: int) -> np.ndarray:
    """Filtration value per cell slot, NaN where no cell exists."""
    bases, types, births = cx._cell_table(dim)
    n1, n2, n3 = cx.shape
    out = np.full(n1 * n2 * n3 * 3, np.nan)
    out[bases * 3 + types] = births
    return out


def plane_axes(shape: tuple[int, int, int]) -> tuple[int, int, int]:
    """(axis_a, axis_b, unit_axis) for a rank-2 grid, a < b."""
    wide = [i for i, n in enumerate(shape) if n > 1]
    unit = [i for i, n in enumerate(shape) if n <= 1]
    return wide[0], wide[1], unit[0]


def dual_vertex_births(cx: GridComplex) -> np.ndarray:
    """Births of the dual-graph vertices in id order, plus the outside
    sentinel at +inf.  Dual vertices are 3-cubes for rank-3 grids and the
    in-plane 2-cubes for rank-2 grids; id order equals packed order both
    ways."""
    if cx.rank == 3:
        _, _, births = cx._cell_table(3)
    else:
        _, _, unit = plane_axes(cx.shape)
        bases, types, births = cx._cell_table(2)
        births = births[types == unit]
    return np.concatenate([births, [math.inf]])


# -- dual-graph edge endpoints -----------------------------------------------


def _dual3_endpoints(shape, bases, types):
    n1, n2, n3 = shape
    x = bases // (n2 * n3)
    rem = bases - x * (n2 * n3)
    y = rem // n3
    z = rem - y * n3
    nd = (n1 - 1) * (n2 - 1) * (n3 - 1)
    did = (x * (n2 - 1) + y) * (n3 - 1) + z
    coord = np.where(types == 0, x, np.where(types == 1, y, z))
    lim = np.where(types == 0, n1 - 2, np.where(types == 1, n2 - 2, n3 - 2))
    step = np.where(types == 0, (n2 - 1) * (n3 - 1), np.where(types == 1, n3 - 1, 1))
    u = np.where(coord <= lim, did, nd)
    v = np.where(coord >= 1, did - step, nd)
    return np.ascontiguousarray(u), np.ascontiguousarray(v), nd


def _dual2_endpoints(shape, bases, types):
    n1, n2, n3 = shape
    a, b, _ = plane_axes(shape)
    ext = (n1, n2, n3)
    na, nb = ext[a], ext[b]
    x = bases // (n2 * n3)
    rem = bases - x * (n2 * n3)
    y = rem // n3
    z = rem - y * n3
    coords = (x, y, z)
    pa, pb = coords[a], coords[b]
    nd = (na - 1) * (nb - 1)
    did = pa * (nb - 1) + pb
    # an edge of type a neighbors the dual cells across axis b and vice versa
    other_is_b = types == a
    oc = np.where(other_is_b, pb, pa)
    olim = np.where(other_is_b, nb - 2, na - 2)
    ostep = np.where(other_is_b, 1, nb - 1)
    u = np.where(oc <= olim, did, nd)
    v = np.where(oc >= 1, did - ostep, nd)
    return np.ascontiguousarray(u), np.ascontiguousarray(v), nd


def _dual_endpoints(cx: GridComplex, bases, types):
    if cx.rank == 3:
        return _dual3_endpoints(cx.shape, bases, types)
    return _dual2_endpoints(cx.shape, bases, types)


# -- cube materialization ----------------------------------------------------


def _cube_from_base(shape, base: int, type_: int, birth: float) -> Cube:
    _, n2, n3 = shape
    x, rem = divmod(int(base), n2 * n3)
    y, z = divmod(rem, n3)
    return Cube.from_coords(float(birth), x, y, z, int(type_))


def _dual_cube(cx: GridComplex, did: int, birth: float) -> Cube:
    """Cube behind a dual-vertex id (3-cube, or in-plane 2-cube)."""
    n1, n2, n3 = cx.shape
    if cx.rank == 3:
        x, rem = divmod(int(did), (n2 - 1) * (n3 - 1))
        y, z = divmod(rem, n3 - 1)
        return Cube.from_coords(float(birth), x, y, z, 0)
    a, b, unit = plane_axes(cx.shape)
    ext = (n1, n2, n3)
    pa, pb = divmod(int(did), ext[b] - 1)
    c = [0, 0, 0]
    c[a], c[b] = pa, pb
    return Cube.from_coords(float(birth), c[0], c[1], c[2], unit)


# -- engine drivers ----------------------------------------------------------


@dataclass
class DualSweep:
    """Result of one dual-graph union-find sweep (dim 2, or dim 1 in 2d).

    ``pairs`` are (creator cube, destroyer cube); ``merged`` flags the
    creators among the sweep's cells, aligned with their ascending
    refined order; ``image_pairs`` is filled by the fused variant."""

    pairs: list[tuple[Cube, Cube]]
    merged: np.ndarray
    image_pairs: list[tuple[Cube, Cube]] | None = None


def dual_sweep(
    cx: GridComplex,
    dual_births: np.ndarray,
    cfg: EngineConfig,
    record_all: bool = False,
    image_dual_births: np.ndarray | None = None,
    image_record_all: bool = False,
) -> DualSweep:
    """Union-find over the dual graph, edges in reverse refined order.

    ``cx`` supplies the edge order and edge (birth) values; the caller
    passes dual-vertex births from the same grid for plain persistence or
    from the comparison grid for image persistence.  When
    ``image_dual_births`` is given, a second forest computes the image
    pairs in the same sweep.
    """
    dim = 2 if cx.rank == 3 else 1
    bases, types, births = sorted_cells(cx, dim, cfg)
    rb = np.ascontiguousarray(bases[::-1])
    rt = np.ascontiguousarray(types[::-1])
    rv = np.ascontiguousarray(births[::-1])
    u, v, _ = _dual_endpoints(cx, rb, rt)
    if image_dual_births is None:
        pv, pe, merged_rev, _ = _kernels.uf_sweep(u, v, rv, dual_births, True, record_all)
        image = None
    else:
        pv, pe, pvi, pei, merged_rev = _kernels.uf_sweep_joint2(
            u, v, rv, dual_births, image_dual_births, image_record_all
        )
        image = [
            (
                _cube_from_base(cx.shape, rb[e], rt[e], rv[e]),
                _dual_cube(cx, d, image_dual_births[d]),
            )
            for d, e in zip(pvi, pei)
        ]
    pairs = [
        (
            _cube_from_base(cx.shape, rb[e], rt[e], rv[e]),
            _dual_cube(cx, d, dual_births[d]),
        )
        for d, e in zip(pv, pe)
    ]
    return DualSweep(pairs=pairs, merged=merged_rev[::-1], image_pairs=image)


@dataclass
class Dim1Reduction:
    pairs: list[tuple[Cube, Cube]]
    state: ReductionState
    n_columns: int


def dim1_reduce(
    row_cx: GridComplex,
    col_bases: np.ndarray,
    col_types: np.ndarray,
    col_deaths: np.ndarray,
    col_emergent: np.ndarray,
    cfg: EngineConfig,
    mode: int = 0,
) -> Dim1Reduction:
    """Implicit reduction of the dim-1 boundary columns.

    Rows are ranked by ``row_cx``; columns arrive in the column grid's
    refined order.  mode 0 computes plain pairs, 1 and 2 the extended and
    strict image pairs (see the kernel).
    """
    shape = row_cx.shape
    _, n2, n3 = shape
    rank_of_slot, birth_by_rank, slot_by_rank = rank_tables(row_cx, cfg)
    state = ReductionState.for_shape(shape, n_columns=col_bases.size)
    pr, pc, arena, used = _kernels.reduce_dim1(
        np.ascontiguousarray(col_bases),
        np.ascontiguousarray(col_types),
        np.ascontiguousarray(col_deaths),
        np.ascontiguousarray(col_emergent),
        np.int64(n2),
        np.int64(n3),
        rank_of_slot,
        birth_by_rank,
        slot_by_rank,
        state.column_index_by_pivot.slots,
        state.cache.start,
        state.cache.length,
        state.cache.arena,
        bool(cfg.emergent_pairs),
        bool(cfg.cache_as_list),
        mode,
    )
    state.cache.arena = arena
    state.cache.used = int(used)
    pairs = []
    for r, c in zip(pr, pc):
        slot = slot_by_rank[r]
        pairs.append(
            (
                _cube_from_base(shape, slot // 3, slot % 3, birth_by_rank[r]),
                _cube_from_base(shape, col_bases[c], col_types[c], col_deaths[c]),
            )
        )
    return Dim1Reduction(pairs=pairs, state=state, n_columns=int(col_bases.size))


@dataclass
class Dim0Sweep:
    pairs: list[tuple[Cube, Cube]]
    merged_slots: np.ndarray
    roots: np.ndarray
    image_pairs_i: list[tuple[Cube, Cube]] | None = None
    image_pairs_j: list[tuple[Cube, Cube]] | None = None


def _edge_endpoints(shape, bases, types):
    _, n2, n3 = shape
    strides = np.array([n2 * n3, n3, 1], dtype=np.int64)
    return np.ascontiguousarray(bases), np.ascontiguousarray(bases + strides[types])


def dim0_sweep(
    order_cx: GridComplex,
    bases: np.ndarray,
    types: np.ndarray,
    deaths: np.ndarray,
    vert_births: np.ndarray,
    cfg: EngineConfig,
    record_all: bool = False,
    joint_births: tuple[np.ndarray, np.ndarray] | None = None,
    joint_record_all: bool = False,
) -> Dim0Sweep:
    """Union-find over vertices along the given edges.

    ``vert_births`` are the flat vertex values of the grid whose order
    decides representatives (the input grid for image persistence).  With
    ``joint_births`` two extra forests compute both inputs' image pairs
    against the same edges; ``vert_births`` then belongs to the
    comparison grid.
    """
    shape = order_cx.shape
    u, v = _edge_endpoints(shape, bases, types)
    deaths = np.ascontiguousarray(deaths)
    img_i = img_j = None
    if joint_births is None:
        pv, pe, merged, parent = _kernels.uf_sweep(
            u, v, deaths, vert_births, False, record_all
        )
    else:
        vb_i, vb_j = joint_births
        pv, pe, pvi, pei, pvj, pej, merged, parent = _kernels.uf_sweep_joint3(
            u, v, deaths, vert_births, vb_i, vb_j, joint_record_all
        )
        img_i = [
            (_cube_from_base(shape, w, 0, vb_i[w]),
             _cube_from_base(shape, bases[e], types[e], deaths[e]))
            for w, e in zip(pvi, pei)
        ]
        img_j = [
            (_cube_from_base(shape, w, 0, vb_j[w]),
             _cube_from_base(shape, bases[e], types[e], deaths[e]))
            for w, e in zip(pvj, pej)
        ]
    pairs = [
        (_cube_from_base(shape, w, 0, vert_births[w]),
         _cube_from_base(shape, bases[e], types[e], deaths[e]))
        for w, e in zip(pv, pe)
    ]
    n1, n2, n3 = shape
    merged_slots = np.zeros(n1 * n2 * n3 * 3, dtype=bool)
    merged_slots[(bases * 3 + types)[merged]] = True
    roots = np.flatnonzero(parent == np.arange(parent.size))
    return Dim0Sweep(
        pairs=pairs,
        merged_slots=merged_slots,
        roots=roots,
        image_pairs_i=img_i,
        image_pairs_j=img_j,
    )


# -- dimension ops on an explicit complex (internal orientation) -------------


def _cubes_to_arrays(cx: GridComplex, cubes) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _, n2, n3 = cx.shape
    bases = np.fromiter(
        ((cube.x * n2 + cube.y) * n3 + cube.z for cube in cubes), np.int64, len(cubes)
    )
    types = np.fromiter((cube.type for cube in cubes), np.int8, len(cubes))
    births = np.fromiter((cube.birth for cube in cubes), np.float64, len(cubes))
    return bases, types, births


def compute_pairs_dim2(
    cx: GridComplex, config: EngineConfig | None = None
) -> tuple[list[PersistencePair], list[Cube]]:
    """Dim-2 pairs of a rank-3 complex plus the surviving 2-cubes.

    The second element lists, in refined order, the 2-cubes that did not
    merge the dual forest; they are the only candidate destroyer columns
    for `compute_pairs_dim1`.
    """
    cfg = config or EngineConfig()
    if cx.rank < 3:
        bases, types, births = sorted_cells(cx, 2, cfg)
        survivors = [
            _cube_from_base(cx.shape, b, t, f) for b, t, f in zip(bases, types, births)
        ]
        return [], survivors
    sweep = dual_sweep(cx, dual_vertex_births(cx), cfg)
    pairs = [PersistencePair(2, b, d) for b, d in sweep.pairs]
    bases, types, births = sorted_cells(cx, 2, cfg)
    keep = ~sweep.merged
    survivors = [
        _cube_from_base(cx.shape, b, t, f)
        for b, t, f in zip(bases[keep], types[keep], births[keep])
    ]
    return pairs, survivors


def compute_pairs_dim1(
    cx: GridComplex,
    columns: list[Cube] | None = None,
    config: EngineConfig | None = None,
) -> tuple[list[PersistencePair], list[Cube]]:
    """Dim-1 pairs from the given destroyer columns (refined order).

    ``columns`` defaults to every 2-cube.  Rank-2 grids take the dual
    route instead of reduction; the column list is ignored there since a
    union-find must see every edge.  Returns the pairs plus the surviving
    1-cubes, the candidate columns for `compute_pairs_dim0`.
    """
    cfg = config or EngineConfig()
    bases1, types1, births1 = sorted_cells(cx, 1, cfg)
    if cx.rank < 2:
        survivors = [
            _cube_from_base(cx.shape, b, t, f)
            for b, t, f in zip(bases1, types1, births1)
        ]
        return [], survivors
    if cx.rank == 2:
        sweep = dual_sweep(cx, dual_vertex_births(cx), cfg)
        keep = ~sweep.merged
        survivors = [
            _cube_from_base(cx.shape, b, t, f)
            for b, t, f in zip(bases1[keep], types1[keep], births1[keep])
        ]
        return [PersistencePair(1, b, d) for b, d in sweep.pairs], survivors
    if columns is None:
        cb, ct, cf = sorted_cells(cx, 2, cfg)
    else:
        cb, ct, cf = _cubes_to_arrays(cx, columns)
    red = dim1_reduce(cx, cb, ct, cf, cf, cfg)
    pivot_slots = red.state.column_index_by_pivot.slots
    keep = pivot_slots[bases1 * 3 + types1] == EMPTY
    survivors = [
        _cube_from_base(cx.shape, b, t, f)
        for b, t, f in zip(bases1[keep], types1[keep], births1[keep])
    ]
    return [PersistencePair(1, b, d) for b, d in red.pairs], survivors


def compute_pairs_dim0(
    cx: GridComplex,
    columns: list[Cube] | None = None,
    config: EngineConfig | None = None,
) -> tuple[list[PersistencePair], list[Cube]]:
    """Dim-0 pairs from the given edges plus the essential vertices."""
    cfg = config or EngineConfig()
    if columns is None:
        bases, types, births = sorted_cells(cx, 1, cfg)
    else:
        bases, types, births = _cubes_to_arrays(cx, columns)
    sweep = dim0_sweep(cx, bases, types, births, cx.values.ravel(), cfg)
    flat = cx.values.ravel()
    roots = sorted(sweep.roots, key=lambda w: (flat[w], w))
    essential = [_cube_from_base(cx.shape, w, 0, flat[w]) for w in roots]
    return [PersistencePair(0, b, d) for b, d in sweep.pairs], essential


# -- full barcodes -----------------------------------------------------------


@dataclass
class VolumeBundle:
    """Finite pairs and essential cubes of one volume, internal values."""

    pairs: dict[int, list[tuple[Cube, Cube]]]
    essential: dict[int, list[Cube]]
    timings: dict[str, float]
    edge_creator_slots: np.ndarray | None = None
    cleared_cols2: np.ndarray | None = None


def compute_volume_bundle(
    cx: GridComplex,
    dims: tuple[int, ...],
    cfg: EngineConfig,
    image_dual_births: np.ndarray | None = None,
    image_record_all: bool = False,
    want_essential: bool = True,
    want_dim0: bool = True,
    force_dual: bool = False,
) -> tuple[VolumeBundle, list[tuple[Cube, Cube]] | None]:
    """Run the engine ladder on one volume.

    When ``image_dual_births`` is given (the comparison grid's dual
    vertex births), the top dual sweep also produces this volume's image
    pairs for that dimension, returned as the second element.

    ``want_dim0=False`` skips the vertex sweep; matching uses it when the
    fused sweep over the comparison's edges supplies dim 0 elsewhere.
    """
    timings: dict[str, float] = {}
    pairs: dict[int, list[tuple[Cube, Cube]]] = {d: [] for d in dims}
    essential: dict[int, list[Cube]] = {d: [] for d in dims}
    rank = cx.rank
    t0 = time.perf_counter()
    for d in [1, 2] if rank == 3 else [1]:
        if cx.cell_count(d):
            cx.sorted_order(d, cfg.partition_sort)
    timings["sort"] = time.perf_counter() - t0
    image_pairs = None
    edge_creator_slots = None
    cleared_cols2 = None
    want_top = (2 in dims) if rank == 3 else (1 in dims and rank == 2)
    top_dim = 2 if rank == 3 else 1

    dual = None
    if rank >= 2 and (
        want_top
        or force_dual
        or (cfg.clearing and top_dim - 1 in dims)
        or image_dual_births is not None
    ):
        t0 = time.perf_counter()
        dual = dual_sweep(
            cx,
            dual_vertex_births(cx),
            cfg,
            image_dual_births=image_dual_births,
            image_record_all=image_record_all,
        )
        timings[f"dim{top_dim}"] = time.perf_counter() - t0
        image_pairs = dual.image_pairs
        if rank == 3:
            cleared_cols2 = ~dual.merged
        if want_top:
            pairs[top_dim] = dual.pairs

    if rank == 3 and 1 in dims:
        t0 = time.perf_counter()
        cb, ct, cf = sorted_cells(cx, 2, cfg)
        if cfg.clearing and cleared_cols2 is not None:
            keep = cleared_cols2
            cb, ct, cf = cb[keep], ct[keep], cf[keep]
        red = dim1_reduce(cx, cb, ct, cf, cf, cfg)
        pairs[1] = red.pairs
        edge_creator_slots = red.state.column_index_by_pivot.slots != EMPTY
        timings["dim1"] = time.perf_counter() - t0
    elif rank == 2 and dual is not None:
        # creators found by the dual sweep; used for dim-0 clearing
        bases1, types1, _ = sorted_cells(cx, 1, cfg)
        n1, n2, n3 = cx.shape
        edge_creator_slots = np.zeros(n1 * n2 * n3 * 3, dtype=bool)
        edge_creator_slots[(bases1 * 3 + types1)[dual.merged]] = True

    dim0 = None
    if want_dim0 and (0 in dims or (1 in dims and rank == 3)):
        t0 = time.perf_counter()
        bases1, types1, births1 = sorted_cells(cx, 1, cfg)
        if cfg.clearing and edge_creator_slots is not None:
            keep = ~edge_creator_slots[bases1 * 3 + types1]
            bases1, types1, births1 = bases1[keep], types1[keep], births1[keep]
        dim0 = dim0_sweep(cx, bases1, types1, births1, cx.values.ravel(), cfg)
        if 0 in dims:
            pairs[0] = dim0.pairs
        timings["dim0"] = time.perf_counter() - t0

    if want_essential:
        flat = cx.values.ravel()
        if 0 in dims and dim0 is not None:
            roots = sorted(dim0.roots, key=lambda w: (flat[w], w))
            essential[0] = [_cube_from_base(cx.shape, w, 0, flat[w]) for w in roots]
        if 1 in dims and rank == 3 and dim0 is not None and edge_creator_slots is not None:
            bases1, types1, births1 = cx._cell_table(1)
            slots1 = bases1 * 3 + types1
            free = ~dim0.merged_slots[slots1] & ~edge_creator_slots[slots1]
            order = np.lexsort((slots1[free], births1[free]))
            essential[1] = [
                _cube_from_base(cx.shape, b, t, f)
                for b, t, f in zip(
                    bases1[free][order], types1[free][order], births1[free][order]
                )
            ]
        # dim-1 creators of rank-2 grids all pair with a real 2-cube, and
        # no grid complex has unpaired 2-cycles, so those lists stay empty

    bundle = VolumeBundle(
        pairs=pairs,
        essential=essential,
        timings=timings,
        edge_creator_slots=edge_creator_slots,
        cleared_cols2=cleared_cols2,
    )
    return bundle, image_pairs


def _sorted_bars(raw: list[tuple[Cube, Cube]]) -> list[tuple[Cube, Cube]]:
    return sorted(raw, key=lambda p: cube_order_key(p[0]))


def _original_cube(cube: Cube, negate: bool) -> Cube:
    return Cube(-cube.birth, cube.packed) if negate else cube


def finalize_bars(
    pairs: list[tuple[Cube, Cube]], dim: int, filtration_mode: str
) -> list[Bar]:
    """Map internal pairs to Bars in original units, sorted by birth."""
    negate = filtration_mode == SUPERLEVEL
    bars = []
    for bc, dc in _sorted_bars(pairs):
        ob, od = _original_cube(bc, negate), _original_cube(dc, negate)
        bars.append(Bar(dim, ob.birth, od.birth, ob, od))
    return bars


def finalize_essential(
    cubes: list[Cube], dim: int, filtration_mode: str
) -> list[Bar]:
    negate = filtration_mode == SUPERLEVEL
    death = -math.inf if negate else math.inf
    bars = []
    for cube in sorted(cubes, key=cube_order_key):
        oc = _original_cube(cube, negate)
        bars.append(Bar(dim, oc.birth, death, oc, None))
    return bars


def _check_dims(dims) -> tuple[int, ...]:
    if dims is None:
        return (0, 1, 2)
    out = tuple(sorted(set(int(d) for d in dims)))
    if not out or any(d not in (0, 1, 2) for d in out):
        raise ValueError(f"dims must be a non-empty subset of {{0, 1, 2}}, got {dims}")
    return out


def compute_barcode(
    grid: VoxelGrid,
    dims=None,
    config: EngineConfig | None = None,
) -> Barcode:
    """Barcode of one grid in the requested dimensions.

    Values in the result are in the grid's own units; superlevel bars
    decrease (birth >= death) and essential deaths are -inf.
    """
    cfg = config or EngineConfig()
    dims = _check_dims(dims)
    t0 = time.perf_counter()
    cx = GridComplex(internal_values(grid))
    bundle, _ = compute_volume_bundle(cx, dims, cfg)
    bc = Barcode(shape=cx.shape, filtration_mode=grid.filtration_mode, dims=dims)
    for d in dims:
        bc.finite[d] = finalize_bars(bundle.pairs.get(d, []), d, grid.filtration_mode)
        bc.essential[d] = finalize_essential(
            bundle.essential.get(d, []), d, grid.filtration_mode
        )
    bc.timings = dict(bundle.timings)
    bc.timings["total"] = time.perf_counter() - t0
    return bc
