"""Cubical complex over a voxel grid (V-construction).

Voxels are the vertices of the complex; the complex consists of all unit
cubes spanned by the grid.  A cube is addressed by the lexicographically
smallest of its vertices plus a type tag that disambiguates direction:

* 0-cubes and 3-cubes: type 0
* 1-cubes: type 0/1/2 = extends in x / y / z
* 2-cubes: type 0/1/2 = spans the y-z / x-z / x-y plane

The filtration value of a cube is the max of its vertex values, so a cube
enters the sublevel filtration exactly when its last voxel does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

COORD_BITS = 20
MAX_EXTENT = 1 << COORD_BITS
TYPE_BITS = 4

_Y_SHIFT = TYPE_BITS + COORD_BITS      # 24
_X_SHIFT = TYPE_BITS + 2 * COORD_BITS  # 44
_COORD_MASK = MAX_EXTENT - 1
_TYPE_MASK = (1 << TYPE_BITS) - 1

#: packed index reserved for the token vertex outside the grid hull (used by
#: the dual sweep); compares above every real cube.
OUTSIDE_PACKED = (1 << 64) - 1

# strides of the three axes in (x, y, z, type) order, used all over
_AXIS_OFFSETS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class OutOfBoundsError(IndexError):
    """Cube coordinates leave the grid."""


def pack_index(x: int, y: int, z: int, type_: int = 0) -> int:
    """Pack coordinates and type into one 64-bit index.

    Integer order on packed indices equals lexicographic order on
    (x, y, z, type).
    """
    return (x << _X_SHIFT) | (y << _Y_SHIFT) | (z << TYPE_BITS) | type_


def unpack_index(packed: int) -> tuple[int, int, int, int]:
    """Invert :func:`pack_index`."""
    return (
        (packed >> _X_SHIFT) & _COORD_MASK,
        (packed >> _Y_SHIFT) & _COORD_MASK,
        (packed >> TYPE_BITS) & _COORD_MASK,
        packed & _TYPE_MASK,
    )


@dataclass(frozen=True)
class Cube:
    """One cell of the complex: a birth value plus a packed index.

    The dimension is contextual (kept by whoever holds the cube), not
    stored.  ``birth`` is the filtration value in the orientation the cube
    was produced in.
    """

    birth: float
    packed: int

    @classmethod
    def from_coords(cls, birth: float, x: int, y: int, z: int, type_: int = 0) -> "Cube":
        return cls(birth, pack_index(x, y, z, type_))

    @property
    def x(self) -> int:
        return (self.packed >> _X_SHIFT) & _COORD_MASK

    @property
    def y(self) -> int:
        return (self.packed >> _Y_SHIFT) & _COORD_MASK

    @property
    def z(self) -> int:
        return (self.packed >> TYPE_BITS) & _COORD_MASK

    @property
    def type(self) -> int:
        return self.packed & _TYPE_MASK

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    @property
    def is_outside(self) -> bool:
        return self.packed == OUTSIDE_PACKED

    def __repr__(self) -> str:  # compact, for test failure output
        if self.is_outside:
            return "Cube(outside)"
        x, y, z, t = unpack_index(self.packed)
        return f"Cube({self.birth!r}, x={x}, y={y}, z={z}, t={t})"


#: token dual vertex for the region outside the grid hull
OUTSIDE_VERTEX = Cube(math.inf, OUTSIDE_PACKED)


def cube_order_key(cube: Cube) -> tuple[float, int]:
    """Sort key of the refined filtration order.

    Births ascend; ties break on the packed index, i.e. lexicographically
    on (x, y, z, type).  Total order on distinct cubes.
    """
    return (cube.birth, cube.packed)


def cube_is_older(a: Cube, b: Cube) -> bool:
    """True iff ``a`` strictly precedes ``b`` in refined order."""
    return cube_order_key(a) < cube_order_key(b)


def _facet_coords(x: int, y: int, z: int, type_: int, dim: int):
    """Facets of a cube in ascending packed order (hard-coded case table)."""
    if dim == 1:
        dx, dy, dz = _AXIS_OFFSETS[type_]
        return ((x, y, z, 0), (x + dx, y + dy, z + dz, 0))
    if dim == 2:
        if type_ == 0:  # spans y-z
            return ((x, y, z, 1), (x, y, z, 2), (x, y, z + 1, 1), (x, y + 1, z, 2))
        if type_ == 1:  # spans x-z
            return ((x, y, z, 0), (x, y, z, 2), (x, y, z + 1, 0), (x + 1, y, z, 2))
        # spans x-y
        return ((x, y, z, 0), (x, y, z, 1), (x, y + 1, z, 0), (x + 1, y, z, 1))
    if dim == 3:
        return (
            (x, y, z, 0),
            (x, y, z, 1),
            (x, y, z, 2),
            (x, y, z + 1, 2),
            (x, y + 1, z, 1),
            (x + 1, y, z, 0),
        )
    raise ValueError(f"cubes of dimension {dim} have no facets here")


def _max_base_coords(shape: tuple[int, int, int], dim: int, type_: int):
    """Largest admissible base coordinate per axis for cubes of (dim, type)."""
    n1, n2, n3 = shape
    hi = [n1 - 1, n2 - 1, n3 - 1]
    if dim == 1:
        hi[type_] -= 1
    elif dim == 2:
        for axis in range(3):
            if axis != type_:
                hi[axis] -= 1
    elif dim == 3:
        hi = [n1 - 2, n2 - 2, n3 - 2]
    return hi


class GridComplex:
    """All cubes over a voxel grid, with filtration values from vertex maxima.

    ``values`` must be a 3d float64 array indexed (x, y, z).  The complex
    itself is never materialized; cells are enumerated on demand and the
    per-dimension tables used by the engines are cached lazily.
    """

    def __init__(self, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 3:
            raise ValueError(f"expected a rank-3 array, got rank {values.ndim}")
        self.values = values
        self.shape: tuple[int, int, int] = tuple(values.shape)  # type: ignore[assignment]
        self._cells: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self._orders: dict[tuple[int, bool], np.ndarray] = {}

    # -- counting ----------------------------------------------------------

    def cell_count(self, dim: int) -> int:
        n1, n2, n3 = self.shape
        if dim == 0:
            return n1 * n2 * n3
        if dim == 1:
            return (n1 - 1) * n2 * n3 + n1 * (n2 - 1) * n3 + n1 * n2 * (n3 - 1)
        if dim == 2:
            return (
                n1 * (n2 - 1) * (n3 - 1)
                + (n1 - 1) * n2 * (n3 - 1)
                + (n1 - 1) * (n2 - 1) * n3
            )
        if dim == 3:
            return (n1 - 1) * (n2 - 1) * (n3 - 1)
        return 0

    @property
    def rank(self) -> int:
        """Number of non-unit axes; selects the engine ladder."""
        return int(sum(n > 1 for n in self.shape))

    # -- single-cube queries -----------------------------------------------

    def _check_cube(self, x: int, y: int, z: int, type_: int, dim: int) -> None:
        if dim == 0 or dim == 3:
            if type_ != 0:
                raise OutOfBoundsError(f"{dim}-cubes have type 0, got {type_}")
        elif type_ not in (0, 1, 2):
            raise OutOfBoundsError(f"bad type {type_} for a {dim}-cube")
        hi = _max_base_coords(self.shape, dim, type_)
        if not (0 <= x <= hi[0] and 0 <= y <= hi[1] and 0 <= z <= hi[2]):
            raise OutOfBoundsError(
                f"no {dim}-cube of type {type_} at ({x}, {y}, {z}) in shape {self.shape}"
            )

    def filtration_value(self, x: int, y: int, z: int, type_: int = 0, dim: int = 0) -> float:
        """Max of the cube's vertex values (the V-construction rule)."""
        self._check_cube(x, y, z, type_, dim)
        v = self.values
        if dim == 0:
            return float(v[x, y, z])
        if dim == 3:
            spans = (1, 1, 1)
        elif dim == 1:
            spans = _AXIS_OFFSETS[type_]
        else:
            spans = tuple(0 if axis == type_ else 1 for axis in range(3))
        return float(
            v[x : x + spans[0] + 1, y : y + spans[1] + 1, z : z + spans[2] + 1].max()
        )

    def make_cube(self, x: int, y: int, z: int, type_: int = 0, dim: int = 0) -> Cube:
        return Cube.from_coords(self.filtration_value(x, y, z, type_, dim), x, y, z, type_)

    def vertices_of(self, cube: Cube, dim: int) -> list[tuple[int, int, int]]:
        """Defining voxels of a cube, in lexicographic order."""
        x, y, z = cube.coords
        if dim == 0:
            spans = (0, 0, 0)
        elif dim == 3:
            spans = (1, 1, 1)
        elif dim == 1:
            spans = _AXIS_OFFSETS[cube.type]
        else:
            spans = tuple(0 if axis == cube.type else 1 for axis in range(3))
        return [
            (x + dx, y + dy, z + dz)
            for dx in range(spans[0] + 1)
            for dy in range(spans[1] + 1)
            for dz in range(spans[2] + 1)
        ]

    # -- enumeration -------------------------------------------------------

    def enumerate_boundary(self, cube: Cube, dim: int, reverse: bool = False) -> Iterator[Cube]:
        """Yield the 2*dim facets, ascending packed order (descending if
        ``reverse``)."""
        x, y, z = cube.coords
        self._check_cube(x, y, z, cube.type, dim)
        facets = _facet_coords(x, y, z, cube.type, dim)
        if reverse:
            facets = tuple(reversed(facets))
        for fx, fy, fz, ft in facets:
            yield self.make_cube(fx, fy, fz, ft, dim - 1)

    def enumerate_dual_edges(self) -> Iterator[tuple[Cube, tuple[Cube, Cube]]]:
        """Yield (2-cube, (dual vertex, dual vertex)) pairs.

        Dual vertices are the up-to-two 3-cubes having the 2-cube as a
        facet; a missing one (2-cube on the grid hull) is the outside
        token, which has birth +inf and compares youngest.
        """
        n1, n2, n3 = self.shape
        for base, type_, birth in zip(*self._cell_table(2)):
            x, y, z = self._base_coords(int(base))
            cof = []
            for sign in (0, -1):
                c = [x, y, z]
                c[type_] += sign
                cx, cy, cz = c
                if 0 <= cx <= n1 - 2 and 0 <= cy <= n2 - 2 and 0 <= cz <= n3 - 2:
                    cof.append(self.make_cube(cx, cy, cz, 0, 3))
                else:
                    cof.append(OUTSIDE_VERTEX)
            yield (
                Cube.from_coords(float(birth), x, y, z, int(type_)),
                (cof[0], cof[1]),
            )

    def enumerate_sorted_columns(
        self, dim: int, exclude=None, partition_sort: bool = True
    ) -> list[Cube]:
        """All dim-cubes in refined order, minus those present in ``exclude``
        (a CubeMap-like object answering ``contains_slot``)."""
        bases, types, births = self._cell_table(dim)
        order = self.sorted_order(dim, partition_sort)
        tfac = 3 if dim in (1, 2) else 1
        out = []
        for i in order:
            base = int(bases[i])
            type_ = int(types[i])
            if exclude is not None and exclude.contains_slot(base * tfac + type_):
                continue
            x, y, z = self._base_coords(base)
            out.append(Cube.from_coords(float(births[i]), x, y, z, type_))
        return out

    # -- dense tables used by the engines ------------------------------------

    def _base_coords(self, base: int) -> tuple[int, int, int]:
        n2, n3 = self.shape[1], self.shape[2]
        x, rem = divmod(base, n2 * n3)
        y, z = divmod(rem, n3)
        return x, y, z

    def _cell_table(self, dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(bases, types, births) of all dim-cubes in packed order.

        ``base`` is the flat C-order index of the smallest vertex, so
        (base, type) ascending equals packed-index ascending; the nested
        generation order makes any later sort birth-only.
        """
        if dim in self._cells:
            return self._cells[dim]
        v = self.values
        n1, n2, n3 = self.shape
        ntypes = 3 if dim in (1, 2) else 1
        buf = np.full((n1, n2, n3, ntypes), np.nan)
        if dim == 0:
            buf[:, :, :, 0] = v
        elif dim == 1:
            if n1 > 1:
                buf[: n1 - 1, :, :, 0] = np.maximum(v[:-1], v[1:])
            if n2 > 1:
                buf[:, : n2 - 1, :, 1] = np.maximum(v[:, :-1], v[:, 1:])
            if n3 > 1:
                buf[:, :, : n3 - 1, 2] = np.maximum(v[:, :, :-1], v[:, :, 1:])
        elif dim == 2:
            if n2 > 1 and n3 > 1:
                m = np.maximum(v[:, :-1, :-1], v[:, 1:, :-1])
                buf[:, : n2 - 1, : n3 - 1, 0] = np.maximum(
                    m, np.maximum(v[:, :-1, 1:], v[:, 1:, 1:])
                )
            if n1 > 1 and n3 > 1:
                m = np.maximum(v[:-1, :, :-1], v[1:, :, :-1])
                buf[: n1 - 1, :, : n3 - 1, 1] = np.maximum(
                    m, np.maximum(v[:-1, :, 1:], v[1:, :, 1:])
                )
            if n1 > 1 and n2 > 1:
                m = np.maximum(v[:-1, :-1, :], v[1:, :-1, :])
                buf[: n1 - 1, : n2 - 1, :, 2] = np.maximum(
                    m, np.maximum(v[:-1, 1:, :], v[1:, 1:, :])
                )
        elif dim == 3:
            if n1 > 1 and n2 > 1 and n3 > 1:
                m = v[:-1, :-1, :-1]
                for dx, dy, dz in (
                    (0, 0, 1), (0, 1, 0), (0, 1, 1),
                    (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1),
                ):
                    m = np.maximum(
                        m, v[dx : dx + n1 - 1, dy : dy + n2 - 1, dz : dz + n3 - 1]
                    )
                buf[: n1 - 1, : n2 - 1, : n3 - 1, 0] = m
        flat = buf.reshape(-1)
        slots = np.flatnonzero(~np.isnan(flat)).astype(np.int64)
        births = flat[slots]
        bases = slots // ntypes
        types = (slots % ntypes).astype(np.int8)
        self._cells[dim] = (bases, types, births)
        return self._cells[dim]

    def sorted_order(self, dim: int, partition_sort: bool = True) -> np.ndarray:
        """Indices into the packed-order cell table giving refined order.

        The table is already packed-index-sorted, so a stable sort on birth
        alone realizes (birth, packed).  When births take at most two
        distinct values (binary labels, possibly sign-flipped), a stable
        two-way partition produces the identical permutation cheaper.
        """
        key = (dim, bool(partition_sort))
        if key in self._orders:
            return self._orders[key]
        births = self._cell_table(dim)[2]
        order = None
        if partition_sort and births.size:
            lo = births.min()
            hi = births.max()
            if lo == hi:
                order = np.arange(births.size, dtype=np.int64)
            else:
                is_lo = births == lo
                if bool(np.all(is_lo | (births == hi))):
                    order = np.concatenate(
                        [np.flatnonzero(is_lo), np.flatnonzero(~is_lo)]
                    ).astype(np.int64)
        if order is None:
            order = np.argsort(births, kind="stable").astype(np.int64)
        self._orders[key] = order
        return order
