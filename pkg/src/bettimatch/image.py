"""Image persistence of one grid's sublevel filtration inside another's.

For grids I >= C (internally, i.e. pointwise after orientation mapping)
every sublevel set of I sits inside the one of C at the same threshold,
so classes born in I can be followed until they die in C.  The engines
are the ones from `persistence` with mixed grids: cells are processed in
the comparison's order where the comparison decides deaths, and row or
representative bookkeeping follows the input grid.

Pairs come in two flavors.  Strict pairs satisfy input birth < comparison
death after orientation mapping and form the image barcode proper.
Extended pairs keep every pivot the engines see, including reverse ones
whose input birth is not below the comparison death; matching needs
those to anchor comparison intervals on both sides.
"""

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .grid import Cube, GridComplex, cube_order_key
from .persistence import (
    _check_dims,
    _original_cube,
    birth_by_slot,
    dim0_sweep,
    dim1_reduce,
    dual_sweep,
    dual_vertex_births,
    sorted_cells,
)
from .volume_io import SUPERLEVEL, VoxelGrid, internal_values


class ShapeMismatch(ValueError):
    pass


class FiltrationModeMismatch(ValueError):
    pass


class DominanceViolation(ValueError):
    """The claimed inclusion does not hold pointwise."""


@dataclass(frozen=True)
class ImagePair:
    """Birth in the input grid, death in the comparison grid, original units."""

    dim: int
    birth: float
    death: float
    birth_cube: Cube
    death_cube: Cube


@dataclass
class ComparisonHandoff:
    """Survivor selections of a comparison run, reusable by image runs.

    ``cols2_keep`` masks the comparison's sorted 2-cubes (True survives
    its dual sweep); ``edge_creator_slots`` flags 1-cube slots that
    create a dim-1 class in the comparison.  Both name cells whose
    columns provably reduce to zero in the image matrices as well.
    """

    cols2_keep: np.ndarray | None = None
    edge_creator_slots: np.ndarray | None = None


def check_compatible(input_grid: VoxelGrid, comparison_grid: VoxelGrid) -> None:
    if input_grid.shape != comparison_grid.shape:
        raise ShapeMismatch(
            f"shapes differ: {input_grid.shape} vs {comparison_grid.shape}"
        )
    if input_grid.filtration_mode != comparison_grid.filtration_mode:
        raise FiltrationModeMismatch(
            f"filtration modes differ: {input_grid.filtration_mode!r}"
            f" vs {comparison_grid.filtration_mode!r}"
        )
    vi = internal_values(input_grid)
    vc = internal_values(comparison_grid)
    if not np.all(vi >= vc):
        raise DominanceViolation(
            "comparison grid must lie below the input grid in filtration order"
        )


def image_bundle(
    cx_in: GridComplex,
    cx_cmp: GridComplex,
    dims: tuple[int, ...],
    extended: bool,
    cfg: EngineConfig,
    handoff: ComparisonHandoff | None = None,
    skip_top: bool = False,
    skip_dim0: bool = False,
) -> dict[int, list[tuple[Cube, Cube]]]:
    """Image pairs per dimension, internal orientation.

    ``handoff`` applies comparison-side clearing when present.  The skip
    flags let the matching pipeline source the top dual sweep and the
    vertex sweep from its fused variants instead.
    """
    rank = cx_in.rank
    top_dim = 2 if rank == 3 else 1
    mode = 1 if extended else 2
    out: dict[int, list[tuple[Cube, Cube]]] = {d: [] for d in dims}

    if rank >= 2 and top_dim in dims and not skip_top:
        sweep = dual_sweep(cx_in, dual_vertex_births(cx_cmp), cfg, record_all=extended)
        out[top_dim] = sweep.pairs

    if rank == 3 and 1 in dims:
        cb, ct, cf = sorted_cells(cx_cmp, 2, cfg)
        if handoff is not None and handoff.cols2_keep is not None:
            keep = handoff.cols2_keep
            cb, ct, cf = cb[keep], ct[keep], cf[keep]
        emergent = birth_by_slot(cx_in, 2)[cb * 3 + ct]
        red = dim1_reduce(cx_in, cb, ct, cf, emergent, cfg, mode=mode)
        out[1] = red.pairs

    if 0 in dims and not skip_dim0:
        bases, types, deaths = sorted_cells(cx_cmp, 1, cfg)
        if handoff is not None and handoff.edge_creator_slots is not None:
            keep = ~handoff.edge_creator_slots[bases * 3 + types]
            bases, types, deaths = bases[keep], types[keep], deaths[keep]
        sweep0 = dim0_sweep(
            cx_cmp, bases, types, deaths, cx_in.values.ravel(), cfg,
            record_all=extended,
        )
        out[0] = sweep0.pairs

    return out


def compute_image_pairs(
    input_grid: VoxelGrid,
    comparison_grid: VoxelGrid,
    dims=None,
    extended: bool = False,
    config: EngineConfig | None = None,
) -> dict[int, list[ImagePair]]:
    """Image pairs of input_grid relative to comparison_grid, original units.

    Requires equal shapes, equal filtration modes, and the comparison
    grid pointwise below the input in filtration order (for superlevel
    grids that means comparison values >= input values).
    """
    cfg = config or EngineConfig()
    dims = _check_dims(dims)
    check_compatible(input_grid, comparison_grid)
    cx_in = GridComplex(internal_values(input_grid))
    cx_cmp = GridComplex(internal_values(comparison_grid))
    raw = image_bundle(cx_in, cx_cmp, dims, extended, cfg)
    negate = input_grid.filtration_mode == SUPERLEVEL
    out: dict[int, list[ImagePair]] = {}
    for d in dims:
        pairs = []
        for bc, dc in sorted(raw.get(d, []), key=lambda p: cube_order_key(p[0])):
            ob, od = _original_cube(bc, negate), _original_cube(dc, negate)
            pairs.append(ImagePair(d, ob.birth, od.birth, ob, od))
        out[d] = pairs
    return out
