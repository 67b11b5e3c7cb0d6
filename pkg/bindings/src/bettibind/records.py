"""Columnar views over the engine's JSON documents.

Every record keeps the parsed document it was built from next to the
numeric arrays sliced out of it.  The arrays are what training code
consumes; the document is the ground truth for anything not worth a
dedicated field.  Infinite endpoints arrive as the strings "inf" and
"-inf" and are mapped back to floats here.
"""

from dataclasses import dataclass

import numpy as np

_SPECIAL = {"inf": np.inf, "-inf": -np.inf}


def _value(x) -> float:
    if isinstance(x, str):
        return _SPECIAL[x]
    return float(x)


def _cell_row(cell) -> list[int]:
    return [cell["x"], cell["y"], cell["z"], cell["type"]]


def _floats(values) -> np.ndarray:
    return np.array([_value(v) for v in values], dtype=np.float64)


def _cells(cells) -> np.ndarray:
    out = np.array([_cell_row(c) for c in cells], dtype=np.int64)
    return out.reshape(len(cells), 4)


@dataclass(frozen=True)
class IntervalBlock:
    """One dimension's intervals as parallel arrays.

    births, deaths: (n,) float64; deaths are +-inf for essential classes.
    birth_cells: (n, 4) int64 rows of x, y, z, cell type.
    death_cells: same, or None when the class never dies.
    """

    births: np.ndarray
    deaths: np.ndarray
    birth_cells: np.ndarray
    death_cells: np.ndarray | None

    def __len__(self) -> int:
        return len(self.births)


def _interval_block(bars: list[dict]) -> IntervalBlock:
    death_cells = [b["death_cell"] for b in bars]
    return IntervalBlock(
        births=_floats(b["birth"] for b in bars),
        deaths=_floats(b["death"] for b in bars),
        birth_cells=_cells([b["birth_cell"] for b in bars]),
        death_cells=None if None in death_cells else _cells(death_cells),
    )


@dataclass(frozen=True)
class MatchedBlock:
    """Matched interval pairs in one dimension, i and j sides aligned row-for-row."""

    births_i: np.ndarray
    deaths_i: np.ndarray
    births_j: np.ndarray
    deaths_j: np.ndarray
    birth_cells_i: np.ndarray
    birth_cells_j: np.ndarray

    def __len__(self) -> int:
        return len(self.births_i)


def _matched_block(rows: list[dict]) -> MatchedBlock:
    return MatchedBlock(
        births_i=_floats(r["i"]["birth"] for r in rows),
        deaths_i=_floats(r["i"]["death"] for r in rows),
        births_j=_floats(r["j"]["birth"] for r in rows),
        deaths_j=_floats(r["j"]["death"] for r in rows),
        birth_cells_i=_cells([r["i"]["birth_cell"] for r in rows]),
        birth_cells_j=_cells([r["j"]["birth_cell"] for r in rows]),
    )


@dataclass(frozen=True)
class BoundLoss:
    matched: float
    unmatched_i: float
    unmatched_j: float
    total: float


def _loss(doc: dict) -> "BoundLoss":
    return BoundLoss(
        matched=_value(doc["matched"]),
        unmatched_i=_value(doc["unmatched_i"]),
        unmatched_j=_value(doc["unmatched_j"]),
        total=_value(doc["total"]),
    )


@dataclass(frozen=True)
class BoundBarcode:
    filtration_mode: str
    shape: tuple[int, ...]
    dims: tuple[int, ...]
    finite: dict[int, IntervalBlock]
    essential: dict[int, IntervalBlock]
    counts: dict[int, dict[str, int]]
    document: dict

    @classmethod
    def from_document(cls, doc: dict) -> "BoundBarcode":
        dims = tuple(doc["dims"])
        return cls(
            filtration_mode=doc["filtration_mode"],
            shape=tuple(doc["shape"]),
            dims=dims,
            finite={d: _interval_block(doc["intervals"][str(d)]["finite"]) for d in dims},
            essential={d: _interval_block(doc["intervals"][str(d)]["essential"]) for d in dims},
            counts={d: dict(doc["counts"][str(d)]) for d in dims},
            document=doc,
        )


@dataclass(frozen=True)
class BoundMatching:
    filtration_mode: str
    shape: tuple[int, ...]
    dims: tuple[int, ...]
    include_reverse_pairs: bool
    matched: dict[int, MatchedBlock]
    unmatched_i: dict[int, IntervalBlock]
    unmatched_j: dict[int, IntervalBlock]
    counts: dict[int, dict[str, int]]
    loss: BoundLoss | None
    document: dict

    @classmethod
    def from_document(cls, doc: dict) -> "BoundMatching":
        dims = tuple(doc["dims"])
        return cls(
            filtration_mode=doc["filtration_mode"],
            shape=tuple(doc["shape"]),
            dims=dims,
            include_reverse_pairs=doc["include_reverse_pairs"],
            matched={d: _matched_block(doc["matched"][str(d)]) for d in dims},
            unmatched_i={d: _interval_block(doc["unmatched_i"][str(d)]) for d in dims},
            unmatched_j={d: _interval_block(doc["unmatched_j"][str(d)]) for d in dims},
            counts={d: dict(doc["counts"][str(d)]) for d in dims},
            loss=_loss(doc["loss"]) if "loss" in doc else None,
            document=doc,
        )


@dataclass(frozen=True)
class TargetBlock:
    """Per-voxel pull targets for one volume, ready for a vectorized scatter.

    coords: (M, 3) int64 voxel indices into the volume.
    current, target, weight: (M,) float64.  The loss contribution of row
    k is weight[k] * (current[k] - target[k])**2, so the gradient with
    respect to the voxel value is 2 * weight * (current - target),
    accumulated over rows that share a voxel.

    Rows already at their target carry no pull and are dropped here;
    the complete report stays available in the parent's `document`.
    """

    coords: np.ndarray
    current: np.ndarray
    target: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return len(self.weight)


def _target_block(rows: list[dict]) -> TargetBlock:
    rows = [r for r in rows if r["current"] != r["target"]]
    coords = np.array([r["voxel"] for r in rows], dtype=np.int64)
    return TargetBlock(
        coords=coords.reshape(len(rows), 3),
        current=_floats(r["current"] for r in rows),
        target=_floats(r["target"] for r in rows),
        weight=_floats(r["weight"] for r in rows),
    )


@dataclass(frozen=True)
class BoundLossTargets:
    loss: BoundLoss
    targets_i: TargetBlock
    targets_j: TargetBlock
    matching: BoundMatching
    document: dict

    @classmethod
    def from_document(cls, doc: dict) -> "BoundLossTargets":
        return cls(
            loss=_loss(doc["loss"]),
            targets_i=_target_block(doc["targets"]["i"]),
            targets_j=_target_block(doc["targets"]["j"]),
            matching=BoundMatching.from_document(doc),
            document=doc,
        )
