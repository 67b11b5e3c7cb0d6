"""Cubical persistent homology and Betti matching for voxel volumes.

The package computes persistence barcodes of 1d to 3d grids under the
vertex-max cube filtration, matches the intervals of two volumes through
their pointwise comparison volume, and derives a differentiable loss
with per-voxel targets from the match.
"""

from .config import EngineConfig
from .grid import Cube, GridComplex, OutOfBoundsError, pack_index, unpack_index
from .image import (
    ComparisonHandoff,
    DominanceViolation,
    FiltrationModeMismatch,
    ImagePair,
    ShapeMismatch,
    compute_image_pairs,
)
from .loss import (
    CriticalVoxelReport,
    LossBreakdown,
    VoxelTarget,
    betti_matching_loss,
    critical_voxels,
    feature_count_metric,
)
from .matching import (
    BettiMatchingResult,
    MatchedPair,
    compute_betti_matching,
    comparison_volume,
)
from .persistence import (
    Bar,
    Barcode,
    PersistencePair,
    compute_barcode,
    compute_pairs_dim0,
    compute_pairs_dim1,
    compute_pairs_dim2,
)
from .volume_io import (
    ParseError,
    ShapeError,
    VoxelGrid,
    internal_values,
    load_volume,
    save_volume,
    to_sublevel,
)

__version__ = "0.1.0"

__all__ = [
    "Bar",
    "Barcode",
    "BettiMatchingResult",
    "ComparisonHandoff",
    "CriticalVoxelReport",
    "Cube",
    "DominanceViolation",
    "EngineConfig",
    "FiltrationModeMismatch",
    "GridComplex",
    "ImagePair",
    "LossBreakdown",
    "MatchedPair",
    "OutOfBoundsError",
    "ParseError",
    "PersistencePair",
    "ShapeError",
    "ShapeMismatch",
    "VoxelGrid",
    "VoxelTarget",
    "betti_matching_loss",
    "comparison_volume",
    "compute_barcode",
    "compute_betti_matching",
    "compute_image_pairs",
    "compute_pairs_dim0",
    "compute_pairs_dim1",
    "compute_pairs_dim2",
    "critical_voxels",
    "feature_count_metric",
    "internal_values",
    "load_volume",
    "pack_index",
    "save_volume",
    "to_sublevel",
    "unpack_index",
    "__version__",
]
