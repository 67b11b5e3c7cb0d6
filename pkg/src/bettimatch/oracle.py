"""Reference persistence via dense boundary-matrix reduction.

Ground truth for the optimized engines: build the full boundary matrix
over all cells, reduce columns left to right until pivots are unique, and
read pairs off the pivots.  Deliberately unoptimized and structurally
unlike the engines: no clearing, no emergent-pair shortcut, no implicit
columns; facet incidence is derived from vertex sets, not a case table.
Columns are arbitrary-precision ints used as bit rows, so the pivot of a
column is just ``bit_length() - 1``.

Guarded to at most 50,000 cells; meant for cross-checking small volumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .volume_io import VoxelGrid, internal_values

CELL_LIMIT = 50_000


class SizeGuardError(ValueError):
    """Volume too large for the dense reference reduction."""


#: cell identity: (x, y, z, type); spans encode direction per dimension the
#: same way the packed representation does.
Cell = tuple[int, int, int, int]


@dataclass(frozen=True)
class OraclePair:
    dim: int
    birth: float
    death: float
    birth_cell: Cell
    death_cell: Cell


@dataclass(frozen=True)
class OracleBarcode:
    finite: dict[int, list[OraclePair]]
    essential: dict[int, list[tuple[float, Cell]]]


def _span_to_type(span: tuple[int, ...]) -> int:
    dim = sum(span)
    if dim == 1:
        return span.index(1)
    if dim == 2:
        return span.index(0)
    return 0


def _cells_of(values: np.ndarray):
    """All cells as (dim, birth, cell-id, vertex list)."""
    shape = values.shape
    cells = []
    for span in product((0, 1), repeat=3):
        dim = sum(span)
        ranges = [range(shape[a] - span[a]) for a in range(3)]
        for x, y, z in product(*ranges):
            verts = [
                (x + dx, y + dy, z + dz)
                for dx in range(span[0] + 1)
                for dy in range(span[1] + 1)
                for dz in range(span[2] + 1)
            ]
            birth = max(float(values[v]) for v in verts)
            cells.append((dim, birth, (x, y, z, _span_to_type(span)), frozenset(verts)))
    return cells


def _facets(dim: int, cell: Cell) -> list[Cell]:
    """Facets by dropping one spanned axis at either end; no case table."""
    x, y, z, type_ = cell
    if dim == 1:
        span = tuple(1 if a == type_ else 0 for a in range(3))
    elif dim == 2:
        span = tuple(0 if a == type_ else 1 for a in range(3))
    elif dim == 3:
        span = (1, 1, 1)
    else:
        return []
    base = (x, y, z)
    out = []
    for axis in range(3):
        if not span[axis]:
            continue
        sub = list(span)
        sub[axis] = 0
        subtype = _span_to_type(tuple(sub))
        for end in (0, 1):
            b = list(base)
            b[axis] += end
            out.append((b[0], b[1], b[2], subtype))
    return out


def _check_size(shape) -> None:
    total = 1
    for n in shape:
        total *= 2 * n - 1
    if total > CELL_LIMIT:
        raise SizeGuardError(
            f"shape {tuple(shape)} has {total} cells, reference reduction caps at {CELL_LIMIT}"
        )


def _reduce(columns: list[int]) -> dict[int, int]:
    """Left-to-right reduction; returns pivot row -> column index.

    Mutates ``columns`` to the reduced matrix.
    """
    pivot_to_col: dict[int, int] = {}
    for j in range(len(columns)):
        while columns[j]:
            low = columns[j].bit_length() - 1
            k = pivot_to_col.get(low)
            if k is None:
                pivot_to_col[low] = j
                break
            columns[j] ^= columns[k]
    return pivot_to_col


def _backmap(value: float, superlevel: bool) -> float:
    return -value if superlevel else value


def oracle_barcode(grid: VoxelGrid, dims=(0, 1, 2)) -> OracleBarcode:
    """Barcode of one volume from the dense reduction."""
    _check_size(grid.shape)
    superlevel = grid.filtration_mode == "superlevel"
    values = internal_values(grid)
    cells = _cells_of(values)
    cells.sort(key=lambda c: (c[1], c[0], c[2]))
    row_of = {(c[0], c[2]): i for i, c in enumerate(cells)}
    columns = []
    for dim, _, cell, _verts in cells:
        col = 0
        for f in _facets(dim, cell):
            col |= 1 << row_of[(dim - 1, f)]
        columns.append(col)
    pivot_to_col = _reduce(columns)

    finite: dict[int, list[OraclePair]] = {d: [] for d in dims}
    essential: dict[int, list[tuple[float, Cell]]] = {d: [] for d in dims}
    paired_rows = set(pivot_to_col)
    paired_cols = set(pivot_to_col.values())
    for row, col in pivot_to_col.items():
        dim, birth, bcell, _ = cells[row]
        _, death, dcell, _ = cells[col]
        if dim in finite and birth != death:
            finite[dim].append(
                OraclePair(dim, _backmap(birth, superlevel), _backmap(death, superlevel), bcell, dcell)
            )
    for i, (dim, birth, cell, _verts) in enumerate(cells):
        if i not in paired_rows and i not in paired_cols and dim in essential:
            essential[dim].append((_backmap(birth, superlevel), cell))
    for d in finite:
        finite[d].sort(key=lambda p: _cell_sort_key(p.dim, p.birth_cell, values))
        essential[d].sort(key=lambda e: _cell_sort_key(d, e[1], values))
    return OracleBarcode(finite, essential)


def _cell_sort_key(dim: int, cell: Cell, values: np.ndarray):
    # refined order of the internal (sublevel-oriented) filtration
    x, y, z, type_ = cell
    if dim == 1:
        span = tuple(1 if a == type_ else 0 for a in range(3))
    elif dim == 2:
        span = tuple(0 if a == type_ else 1 for a in range(3))
    elif dim == 3:
        span = (1, 1, 1)
    else:
        span = (0, 0, 0)
    birth = float(
        values[x : x + span[0] + 1, y : y + span[1] + 1, z : z + span[2] + 1].max()
    )
    return (birth, x, y, z, type_)


def oracle_image_pairs(
    input_grid: VoxelGrid, comparison_grid: VoxelGrid, dims=(0, 1, 2), extended: bool = True
):
    """Image persistence pairs of the inclusion (input into comparison).

    The comparison complex's boundary matrix is reduced with columns in the
    comparison's refined order and rows in the input's.  Extended mode keeps
    every pivot pair (including reverse ones); strict mode keeps pairs with
    input birth strictly below comparison death.
    """
    if input_grid.shape != comparison_grid.shape:
        raise ValueError("image persistence needs equal shapes")
    _check_size(comparison_grid.shape)
    superlevel = input_grid.filtration_mode == "superlevel"
    vi = internal_values(input_grid)
    vc = internal_values(comparison_grid)
    if not bool(np.all(vi >= vc)):
        raise ValueError("input must dominate comparison pointwise (sublevel orientation)")

    cells = _cells_of(vc)
    col_cells = sorted(cells, key=lambda c: (c[1], c[0], c[2]))

    def input_birth(cell_entry):
        _, _, _cell, verts = cell_entry
        return max(float(vi[v]) for v in verts)

    row_cells = sorted(cells, key=lambda c: (input_birth(c), c[0], c[2]))
    row_of = {(c[0], c[2]): i for i, c in enumerate(row_cells)}
    columns = []
    for dim, _, cell, _verts in col_cells:
        col = 0
        for f in _facets(dim, cell):
            col |= 1 << row_of[(dim - 1, f)]
        columns.append(col)
    pivot_to_col = _reduce(columns)

    pairs: dict[int, list[OraclePair]] = {d: [] for d in dims}
    for row, col in pivot_to_col.items():
        dim, _, bcell, bverts = row_cells[row]
        _, death, dcell, _ = col_cells[col]
        birth = max(float(vi[v]) for v in bverts)
        if dim not in pairs:
            continue
        if not extended and not (birth < death):
            continue
        pairs[dim].append(
            OraclePair(dim, _backmap(birth, superlevel), _backmap(death, superlevel), bcell, dcell)
        )
    for d in pairs:
        pairs[d].sort(key=lambda p: _cell_sort_key(p.dim, p.birth_cell, vi))
    return pairs


def oracle_betti_matching(
    grid_a: VoxelGrid, grid_b: VoxelGrid, dims=(0, 1, 2), extended: bool = True
):
    """Betti matching assembled from oracle barcodes and image pairs.

    Returns (matched, unmatched_a, unmatched_b) where matched maps dim to
    a list of (pair_a, pair_b) OraclePair tuples.
    """
    if grid_a.shape != grid_b.shape:
        raise ValueError("matching needs equal shapes")
    if grid_a.filtration_mode != grid_b.filtration_mode:
        raise ValueError("matching needs equal filtration modes")
    mode = grid_a.filtration_mode
    superlevel = mode == "superlevel"
    va, vb = grid_a.values, grid_b.values
    comparison = VoxelGrid(np.maximum(va, vb) if superlevel else np.minimum(va, vb), mode)

    bar_a = oracle_barcode(grid_a, dims)
    bar_b = oracle_barcode(grid_b, dims)
    bar_c = oracle_barcode(comparison, dims)
    img_a = oracle_image_pairs(grid_a, comparison, dims, extended)
    img_b = oracle_image_pairs(grid_b, comparison, dims, extended)

    matched = {d: [] for d in dims}
    unmatched_a = {d: [] for d in dims}
    unmatched_b = {d: [] for d in dims}
    for d in dims:
        by_birth_a = {p.birth_cell: p for p in bar_a.finite[d]}
        by_birth_b = {p.birth_cell: p for p in bar_b.finite[d]}
        img_by_death_a = {p.death_cell: p for p in img_a[d]}
        img_by_death_b = {p.death_cell: p for p in img_b[d]}
        taken_a = set()
        taken_b = set()
        for cpair in bar_c.finite[d]:
            ia = img_by_death_a.get(cpair.death_cell)
            ib = img_by_death_b.get(cpair.death_cell)
            if ia is None or ib is None:
                continue
            pa = by_birth_a.get(ia.birth_cell)
            pb = by_birth_b.get(ib.birth_cell)
            if pa is None or pb is None:
                continue
            matched[d].append((pa, pb))
            taken_a.add(pa.birth_cell)
            taken_b.add(pb.birth_cell)
        unmatched_a[d] = [p for p in bar_a.finite[d] if p.birth_cell not in taken_a]
        unmatched_b[d] = [p for p in bar_b.finite[d] if p.birth_cell not in taken_b]
    return matched, unmatched_a, unmatched_b
