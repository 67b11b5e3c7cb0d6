"""Array bindings for the betti engine.

Three calls cover the training-loop surface: `bound_barcode` for one
volume's intervals, `bound_match` for the matched/unmatched structure
of a volume pair, and `bound_loss_targets` for the loss value plus
per-voxel pull targets in columnar form.  Superlevel filtration is the
default, matching the usual convention for network likelihood maps;
pass mode="sublevel" to override.

The layer is stateless and re-entrant: each call runs the engine in a
fresh subprocess on private temp files, so concurrent calls from host
threads never share anything, and the interpreter lock is released for
the duration of the computation.
"""

from dataclasses import dataclass

from .records import (
    BoundBarcode,
    BoundLoss,
    BoundLossTargets,
    BoundMatching,
    IntervalBlock,
    MatchedBlock,
    TargetBlock,
)
from .runner import as_volume, run_core

# Mirrors the engine's version; the two move together.
__version__ = "0.1.0"

_MODES = ("superlevel", "sublevel")


@dataclass(frozen=True)
class MatchOptions:
    """Knobs shared by bound_match and bound_loss_targets."""

    mode: str = "superlevel"
    dims: tuple[int, ...] | None = None
    reverse_pairs: bool = True
    threads: int | None = None


def _common_flags(mode: str, dims, threads) -> list[str]:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    flags = [] if mode == "superlevel" else ["--sublevel"]
    if dims is not None:
        flags += ["--dims", ",".join(str(d) for d in dims)]
    if threads is not None:
        flags += ["--threads", str(threads)]
    return flags


def bound_barcode(
    array, mode: str = "superlevel", dims=None, threads=None
) -> BoundBarcode:
    """Persistence intervals of one volume."""
    volume = as_volume(array)
    doc = run_core("barcode", [volume], _common_flags(mode, dims, threads))
    return BoundBarcode.from_document(doc)


def _match_flags(options: MatchOptions, extra: list[str]) -> list[str]:
    flags = _common_flags(options.mode, options.dims, options.threads)
    if not options.reverse_pairs:
        flags.append("--no-reverse-pairs")
    return flags + extra


def bound_match(array_i, array_j, options: MatchOptions = MatchOptions()) -> BoundMatching:
    """Matched and unmatched intervals of a volume pair, with the loss."""
    volumes = [as_volume(array_i), as_volume(array_j)]
    doc = run_core("match", volumes, _match_flags(options, ["--loss"]))
    return BoundMatching.from_document(doc)


def bound_loss_targets(
    array_i, array_j, options: MatchOptions = MatchOptions()
) -> BoundLossTargets:
    """Loss plus columnar per-voxel targets for gradient scatter."""
    volumes = [as_volume(array_i), as_volume(array_j)]
    doc = run_core("match", volumes, _match_flags(options, ["--targets"]))
    return BoundLossTargets.from_document(doc)


__all__ = [
    "BoundBarcode",
    "BoundLoss",
    "BoundLossTargets",
    "BoundMatching",
    "IntervalBlock",
    "MatchOptions",
    "MatchedBlock",
    "TargetBlock",
    "bound_barcode",
    "bound_loss_targets",
    "bound_match",
    "__version__",
]
