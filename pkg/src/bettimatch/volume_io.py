"""Loading, saving and normalizing voxel volumes.

Arrays are widened to float64 and indexed (x, y, z); rank-1 and rank-2
inputs get unit trailing axes.  Everything downstream computes sublevel
persistence; superlevel volumes are handled by negating values on the way
in and negating reported endpoints on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import MAX_EXTENT

SUBLEVEL = "sublevel"
SUPERLEVEL = "superlevel"


class ParseError(ValueError):
    """Volume file cannot be decoded (bad magic, truncated payload, ...)."""


class ShapeError(ValueError):
    """Volume shape unusable: rank above 3 or an axis above 2**20."""


def _normalize(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim > 3:
        raise ShapeError(f"rank {values.ndim} volume not supported (max 3)")
    while values.ndim < 3:
        values = values[..., np.newaxis]
    if any(n > MAX_EXTENT for n in values.shape):
        raise ShapeError(f"axis above {MAX_EXTENT} not representable: {values.shape}")
    if values.size == 0:
        raise ShapeError(f"empty volume: {values.shape}")
    values = np.ascontiguousarray(values, dtype=np.float64)
    if np.isnan(values).any():
        raise ValueError("volume contains NaN")
    if np.isinf(values).any():
        raise ValueError("volume contains infinite values")
    return values


@dataclass(frozen=True)
class VoxelGrid:
    """A voxel volume plus the direction its filtration sweeps.

    ``values`` is float64, C-contiguous, indexed (x, y, z).
    ``filtration_mode`` is "sublevel" (thresholds ascend) or "superlevel"
    (thresholds descend; the default for image segmentation work).
    """

    values: np.ndarray = field(repr=False)
    filtration_mode: str = SUBLEVEL

    def __post_init__(self):
        if self.filtration_mode not in (SUBLEVEL, SUPERLEVEL):
            raise ValueError(f"unknown filtration mode {self.filtration_mode!r}")
        object.__setattr__(self, "values", _normalize(self.values))

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.values.shape)  # type: ignore[return-value]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VoxelGrid)
            and self.filtration_mode == other.filtration_mode
            and self.shape == other.shape
            and bool(np.array_equal(self.values, other.values))
        )


def load_volume(
    path,
    format: str = "npy",
    shape=None,
    dtype="float64",
    filtration_mode: str = SUBLEVEL,
) -> VoxelGrid:
    """Read a volume from ``path``.

    format "npy" reads NPY v1.0/v2.0 with the header-declared shape and
    element order; format "raw" reads a bare C-order buffer of ``dtype``
    and needs an explicit ``shape``.
    """
    if format == "npy":
        try:
            values = np.load(path, allow_pickle=False)
        except (ValueError, OSError, EOFError) as exc:
            raise ParseError(f"cannot parse {path}: {exc}") from exc
    elif format == "raw":
        if shape is None:
            raise ShapeError("raw volumes need an explicit shape")
        values = np.fromfile(path, dtype=np.dtype(dtype))
        expected = int(np.prod(shape))
        if values.size != expected:
            raise ParseError(
                f"raw payload holds {values.size} elements, shape {tuple(shape)} needs {expected}"
            )
        values = values.reshape(shape)
    else:
        raise ValueError(f"unknown volume format {format!r}")
    return VoxelGrid(values, filtration_mode)


def save_volume(grid: VoxelGrid, path) -> None:
    """Write the values as NPY; the filtration mode is not persisted."""
    np.save(path, grid.values)


def to_sublevel(grid: VoxelGrid) -> VoxelGrid:
    """Negate values and flip the filtration mode.

    Superlevel filtrations of f are sublevel filtrations of -f; applying
    this twice returns the original values.
    """
    mode = SUBLEVEL if grid.filtration_mode == SUPERLEVEL else SUPERLEVEL
    return VoxelGrid(-grid.values, mode)


def internal_values(grid: VoxelGrid) -> np.ndarray:
    """Values in sublevel orientation, as consumed by the engines."""
    if grid.filtration_mode == SUPERLEVEL:
        return -grid.values
    return grid.values
