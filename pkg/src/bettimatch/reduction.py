"""Shared machinery of the implicit boundary-matrix reduction.

The working boundary of a column is a priority queue of cubes in refined
order where mod-2 cancellation happens lazily at read time: equal cubes
are popped in pairs and annihilate.  Lookup tables are flat arrays over
the coordinate space, one slot per (vertex, type); emptiness is a reserved
sentinel.  The numba kernels in :mod:`bettimatch._kernels` write into the
same backing arrays these classes expose.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Cube

EMPTY = -1


class CubeXorQueue:
    """Max-priority queue of cubes with lazy mod-2 deduplication.

    push() is plain insertion; get_pivot() pops equal cubes in pairs until
    a survivor remains (pushed back and returned) or the queue runs empty;
    to_list() drains the queue into the deduplicated support.
    """

    def __init__(self):
        self._heap: list[tuple[float, int]] = []

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, cube: Cube) -> None:
        # negated key turns heapq's min-heap into a max-heap on refined order
        heapq.heappush(self._heap, (-cube.birth, -cube.packed))

    def _pop(self) -> tuple[float, int]:
        b, p = heapq.heappop(self._heap)
        return (-b, -p)

    def get_pivot(self) -> Optional[Cube]:
        """Youngest surviving cube, or None if everything cancels."""
        if not self._heap:
            return None
        birth, packed = self._pop()
        while self._heap and -self._heap[0][1] == packed:
            self._pop()  # annihilate the duplicate pair
            if not self._heap:
                return None
            birth, packed = self._pop()
        heapq.heappush(self._heap, (-birth, -packed))
        return Cube(birth, packed)

    def to_list(self) -> list[Cube]:
        """Drain into the mod-2 support (youngest first)."""
        out = []
        while self._heap:
            birth, packed = self._pop()
            if self._heap and -self._heap[0][1] == packed:
                self._pop()
                continue
            out.append(Cube(birth, packed))
        return out


def slot_index(n2: int, n3: int, x: int, y: int, z: int, type_: int, ntypes: int) -> int:
    """Injective cube-to-slot map over a grid: ((x*N2+y)*N3+z)*T + type."""
    return ((x * n2 + y) * n3 + z) * ntypes + type_


class CubeMap:
    """Flat-array map from cubes of one dimension to int payloads.

    Sized N1*N2*N3*T with T = 3 for 1-/2-cubes and 1 otherwise; EMPTY (-1)
    marks free slots.  ``slots`` is the backing int64 array the kernels
    index directly.
    """

    def __init__(self, shape: tuple[int, int, int], dim: int):
        self.shape = shape
        self.ntypes = 3 if dim in (1, 2) else 1
        n1, n2, n3 = shape
        self.slots = np.full(n1 * n2 * n3 * self.ntypes, EMPTY, dtype=np.int64)

    def _slot(self, cube: Cube) -> int:
        return slot_index(
            self.shape[1], self.shape[2], cube.x, cube.y, cube.z, cube.type, self.ntypes
        )

    def get(self, cube: Cube) -> Optional[int]:
        v = int(self.slots[self._slot(cube)])
        return None if v == EMPTY else v

    def set(self, cube: Cube, value: int) -> None:
        if value == EMPTY:
            raise ValueError("payload collides with the empty sentinel")
        self.slots[self._slot(cube)] = value

    def contains(self, cube: Cube) -> bool:
        return self.slots[self._slot(cube)] != EMPTY

    def contains_slot(self, slot: int) -> bool:
        return self.slots[slot] != EMPTY

    def __len__(self) -> int:
        return int(np.count_nonzero(self.slots != EMPTY))


class CubeListMap:
    """Flat-array map from cubes to cached columns (lists of row ordinals).

    Payloads live in one growing arena; a slot stores (start, length).
    This is the cache format of reduced columns: a deduplicated list is
    replayed by straight iteration, which is what makes cached replays
    cheaper than re-reducing.
    """

    def __init__(self, shape: tuple[int, int, int], dim: int, capacity: int = 1024):
        self.ntypes = 3 if dim in (1, 2) else 1
        self.shape = shape
        n1, n2, n3 = shape
        n = n1 * n2 * n3 * self.ntypes
        self.start = np.full(n, EMPTY, dtype=np.int64)
        self.length = np.zeros(n, dtype=np.int64)
        self.arena = np.empty(max(capacity, 16), dtype=np.int64)
        self.used = 0

    def _slot(self, cube: Cube) -> int:
        return slot_index(
            self.shape[1], self.shape[2], cube.x, cube.y, cube.z, cube.type, self.ntypes
        )

    def set(self, cube: Cube, values) -> None:
        values = np.asarray(values, dtype=np.int64)
        need = self.used + values.size
        if need > self.arena.size:
            grown = np.empty(max(need, 2 * self.arena.size), dtype=np.int64)
            grown[: self.used] = self.arena[: self.used]
            self.arena = grown
        s = self._slot(cube)
        self.start[s] = self.used
        self.length[s] = values.size
        self.arena[self.used : self.used + values.size] = values
        self.used = int(need)

    def get(self, cube: Cube) -> Optional[np.ndarray]:
        s = self._slot(cube)
        if self.start[s] == EMPTY:
            return None
        a = int(self.start[s])
        return self.arena[a : a + int(self.length[s])]

    def contains_slot(self, slot: int) -> bool:
        return self.start[slot] != EMPTY


@dataclass
class ReductionState:
    """Mutable state of one dim-1 reduction sweep.

    ``column_index_by_pivot`` maps a pivot 1-cube to the ordinal of the
    column that owns it; ``cache`` maps a reduced 2-cube column to its
    final support.  Kept as two separate maps since their key spaces and
    payloads differ.
    """

    column_index_by_pivot: CubeMap
    cache: CubeListMap

    @classmethod
    def for_shape(cls, shape: tuple[int, int, int], n_columns: int = 0) -> "ReductionState":
        return cls(
            column_index_by_pivot=CubeMap(shape, dim=1),
            cache=CubeListMap(shape, dim=2, capacity=max(4 * n_columns, 64)),
        )
