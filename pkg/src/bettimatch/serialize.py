"""Canonical JSON for barcodes, matchings, and loss reports.

Output is byte-stable: keys sorted, intervals in refined filtration
order, floats through repr (shortest round-trip), infinities as the
strings "inf" and "-inf" since JSON has no literal for them.  Two runs
on the same input must produce identical bytes; anything inherently
unstable (wall-clock timings) stays out unless explicitly requested.
"""

import json
import math

from .loss import CriticalVoxelReport, LossBreakdown
from .matching import BettiMatchingResult
from .persistence import Bar, Barcode
from .volume_io import SUPERLEVEL


def _num(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("cannot serialize NaN")
    return float(x)


def _cell(cube) -> dict:
    return {"x": cube.x, "y": cube.y, "z": cube.z, "type": cube.type}


def _bar_dict(bar: Bar) -> dict:
    return {
        "birth": _num(bar.birth),
        "death": _num(bar.death),
        "birth_cell": _cell(bar.birth_cube),
        "death_cell": None if bar.death_cube is None else _cell(bar.death_cube),
    }


def _bar_key(bar: Bar, mode: str):
    sign = -1.0 if mode == SUPERLEVEL else 1.0
    return (sign * bar.birth, bar.birth_cube.packed)


def _bars(bars: list[Bar], mode: str) -> list[dict]:
    return [_bar_dict(b) for b in sorted(bars, key=lambda b: _bar_key(b, mode))]


def barcode_to_dict(bc: Barcode, timings: bool = False) -> dict:
    out = {
        "schema": "bettimatch-barcode/1",
        "shape": list(bc.shape),
        "filtration_mode": bc.filtration_mode,
        "dims": list(bc.dims),
        "intervals": {
            str(d): {
                "finite": _bars(bc.finite.get(d, []), bc.filtration_mode),
                "essential": _bars(bc.essential.get(d, []), bc.filtration_mode),
            }
            for d in bc.dims
        },
        "counts": {
            str(d): {
                "finite": bc.n_finite(d),
                "essential": bc.n_essential(d),
            }
            for d in bc.dims
        },
    }
    if timings:
        out["timings"] = {k: float(v) for k, v in bc.timings.items()}
    return out


def matching_to_dict(res: BettiMatchingResult, timings: bool = False) -> dict:
    mode = res.filtration_mode
    out = {
        "schema": "bettimatch-matching/1",
        "shape": list(res.shape),
        "filtration_mode": mode,
        "dims": list(res.dims),
        "include_reverse_pairs": res.include_reverse_pairs,
        "matched": {
            str(d): [
                {"i": _bar_dict(p.bar_i), "j": _bar_dict(p.bar_j)}
                for p in res.matched.get(d, [])
            ]
            for d in res.dims
        },
        "unmatched_i": {str(d): _bars(res.unmatched_i.get(d, []), mode) for d in res.dims},
        "unmatched_j": {str(d): _bars(res.unmatched_j.get(d, []), mode) for d in res.dims},
        "essential_i": {str(d): _bars(res.essential_i.get(d, []), mode) for d in res.dims},
        "essential_j": {str(d): _bars(res.essential_j.get(d, []), mode) for d in res.dims},
        "counts": {
            str(d): {
                "matched": res.n_matched(d),
                "unmatched_i": len(res.unmatched_i.get(d, [])),
                "unmatched_j": len(res.unmatched_j.get(d, [])),
                "essential_i": len(res.essential_i.get(d, [])),
                "essential_j": len(res.essential_j.get(d, [])),
            }
            for d in res.dims
        },
    }
    if timings:
        out["timings"] = {k: float(v) for k, v in res.timings.items()}
    return out


def loss_to_dict(loss: LossBreakdown) -> dict:
    return {
        "matched": _num(loss.matched),
        "unmatched_i": _num(loss.unmatched_i),
        "unmatched_j": _num(loss.unmatched_j),
        "total": _num(loss.total),
    }


def feature_count_to_dict(per_dim: dict[int, int]) -> dict:
    total = int(sum(per_dim.values()))
    return {
        "per_dim": {str(d): int(n) for d, n in per_dim.items()},
        "total": total,
        "doubled": 2 * total,
    }


def targets_to_dict(report: CriticalVoxelReport) -> dict:
    def one(targets):
        return [
            {
                "voxel": list(t.voxel),
                "current": _num(t.current),
                "target": _num(t.target),
                "weight": _num(t.weight),
                "dim": t.dim,
                "endpoint": t.endpoint,
                "matched": t.matched,
            }
            for t in targets
        ]

    return {"i": one(report.targets_i), "j": one(report.targets_j)}


def dumps_canonical(payload: dict) -> str:
    """Sorted-key JSON with a trailing newline; rejects NaN/inf floats
    that slipped past `_num`."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
