"""Command line interface.

    betti barcode VOLUME          persistence intervals of one volume
    betti match VOLUME_I VOLUME_J matched and unmatched intervals, loss
    betti bench VOLUME_I [VOLUME_J] wall-time statistics over repeats

Volumes are NPY files (or raw buffers with --format raw --shape ...) and
are treated as superlevel filtrations unless --sublevel is given, which
fits probability maps where bright means foreground.

JSON output is byte-stable across runs; --timings adds wall-clock
numbers and is therefore excluded from that guarantee.  --repeat N
recomputes N times and fails if any serialization differs.  --verify
cross-checks against the dense reference reducer and prints
"oracle: match" on standard error (standard output stays valid JSON).

Exit codes: 0 success; 1 unreadable input (missing file, bad NPY
header, truncated raw buffer); 2 invalid request (bad shape, dims,
dtype, mixed filtration modes, dominance violation, usage errors);
3 verification mismatch (--verify disagreement, unstable --repeat,
bench equivalence failure).
"""

import argparse
import statistics
import sys
import time

from .config import EngineConfig
from .image import DominanceViolation, FiltrationModeMismatch, ShapeMismatch
from .loss import betti_matching_loss, critical_voxels, feature_count_metric
from .matching import compute_betti_matching
from .oracle import SizeGuardError
from .persistence import compute_barcode
from .serialize import (
    barcode_to_dict,
    dumps_canonical,
    feature_count_to_dict,
    loss_to_dict,
    matching_to_dict,
    targets_to_dict,
)
from .volume_io import SUBLEVEL, SUPERLEVEL, ParseError, ShapeError, load_volume

_FLAG_NAMES = (
    "emergent-pairs",
    "clearing",
    "comparison-clearing",
    "joint-unionfind",
    "cache-as-list",
    "partition-sort",
    "parallel",
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--sublevel",
        action="store_true",
        help="treat values as a sublevel filtration (default: superlevel)",
    )
    p.add_argument(
        "--dims",
        default="0,1,2",
        help="comma-separated homology dimensions (default: 0,1,2)",
    )
    p.add_argument("--format", choices=("npy", "raw"), default="npy")
    p.add_argument(
        "--shape",
        default=None,
        help="volume shape N1,N2,N3 (required for --format raw)",
    )
    p.add_argument("--dtype", default="float64", help="element type for raw input")
    p.add_argument("-o", "--output", default=None, help="write JSON here instead of stdout")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.add_argument(
        "--repeat",
        type=int,
        default=None,
        metavar="N",
        help="recompute N times and require byte-identical results"
        " (default 1; bench defaults to 10)",
    )
    p.add_argument("--threads", type=int, default=None, help="thread pool size")
    p.add_argument(
        "--verify",
        action="store_true",
        help="cross-check against the dense reference reducer (small volumes only)",
    )
    p.add_argument(
        "--no-reverse-pairs",
        action="store_true",
        help="anchor matches on strict image intervals only (match/bench)",
    )
    for name in _FLAG_NAMES:
        p.add_argument(
            f"--no-{name}",
            dest=name.replace("-", "_"),
            action="store_false",
            help=f"disable the {name.replace('-', ' ')} optimization",
        )


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(sorted({int(part) for part in text.split(",") if part.strip() != ""}))
    except ValueError:
        raise ValueError(f"bad --dims value: {text!r}")
    if not dims or any(d not in (0, 1, 2) for d in dims):
        raise ValueError(f"--dims must name dimensions 0-2, got {text!r}")
    return dims


def _parse_shape(text):
    if text is None:
        return None
    return tuple(int(part) for part in text.split(","))


def _config(args) -> EngineConfig:
    return EngineConfig(
        emergent_pairs=args.emergent_pairs,
        clearing=args.clearing,
        comparison_clearing=args.comparison_clearing,
        joint_unionfind=args.joint_unionfind,
        cache_as_list=args.cache_as_list,
        partition_sort=args.partition_sort,
        parallel=args.parallel,
        threads=args.threads,
    )


def _load(args, path):
    mode = SUBLEVEL if args.sublevel else SUPERLEVEL
    return load_volume(
        path,
        format=args.format,
        shape=_parse_shape(args.shape),
        dtype=args.dtype,
        filtration_mode=mode,
    )


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stable_repeat(compute, serialize, repeat: int):
    """Run `compute` repeat times; return (result, canonical json).

    The serialized form must not change between runs; timings are added
    by the caller afterwards, so they never enter the comparison.
    """
    result = compute()
    reference = serialize(result)
    for _ in range(max(0, repeat - 1)):
        again = compute()
        if serialize(again) != reference:
            raise RuntimeError("nondeterministic output across --repeat runs")
        result = again
    return result, reference


def _cube_cells(bars):
    return sorted(
        (b.birth, b.death, (b.birth_cube.x, b.birth_cube.y, b.birth_cube.z, b.birth_cube.type))
        for b in bars
    )


def _verify_barcode(grid, bc, dims) -> None:
    from .oracle import oracle_barcode

    exp = oracle_barcode(grid, dims)
    for d in dims:
        mine = _cube_cells(bc.finite[d])
        theirs = sorted((p.birth, p.death, p.birth_cell) for p in exp.finite.get(d, []))
        if mine != theirs:
            raise AssertionError(f"dim {d}: finite intervals disagree with reference")
        ess_mine = sorted((b.birth, (b.birth_cube.x, b.birth_cube.y, b.birth_cube.z, b.birth_cube.type)) for b in bc.essential[d])
        ess_theirs = sorted(exp.essential.get(d, []))
        if ess_mine != [(b, c) for b, c in ess_theirs]:
            raise AssertionError(f"dim {d}: essential intervals disagree with reference")


def _verify_matching(grid_i, grid_j, res, dims) -> None:
    from .oracle import oracle_betti_matching

    matched, unmatched_a, unmatched_b = oracle_betti_matching(
        grid_i, grid_j, dims, extended=res.include_reverse_pairs
    )
    for d in dims:
        mine = sorted(
            ((p.bar_i.birth, p.bar_i.death), (p.bar_j.birth, p.bar_j.death))
            for p in res.matched[d]
        )
        theirs = sorted(((a.birth, a.death), (b.birth, b.death)) for a, b in matched[d])
        if mine != theirs:
            raise AssertionError(f"dim {d}: matching disagrees with reference")
        if _cube_cells(res.unmatched_i[d]) != sorted(
            (p.birth, p.death, p.birth_cell) for p in unmatched_a[d]
        ):
            raise AssertionError(f"dim {d}: unmatched intervals (first volume) disagree")
        if _cube_cells(res.unmatched_j[d]) != sorted(
            (p.birth, p.death, p.birth_cell) for p in unmatched_b[d]
        ):
            raise AssertionError(f"dim {d}: unmatched intervals (second volume) disagree")


def _cmd_barcode(args) -> int:
    dims = _parse_dims(args.dims)
    cfg = _config(args)
    grid = _load(args, args.volume)

    def compute():
        return compute_barcode(grid, dims=dims, config=cfg)

    bc, _ = _stable_repeat(compute, lambda b: dumps_canonical(barcode_to_dict(b)), args.repeat)
    if args.verify:
        _verify_barcode(grid, bc, dims)
        print("oracle: match", file=sys.stderr)
    _emit(dumps_canonical(barcode_to_dict(bc, timings=args.timings)), args.output)
    return 0


def _cmd_match(args) -> int:
    dims = _parse_dims(args.dims)
    cfg = _config(args)
    grid_i = _load(args, args.volume_i)
    grid_j = _load(args, args.volume_j)

    def compute():
        return compute_betti_matching(
            grid_i,
            grid_j,
            dims=dims,
            config=cfg,
            include_reverse_pairs=not args.no_reverse_pairs,
        )

    def serialize(res):
        payload = matching_to_dict(res)
        if args.loss or args.targets:
            payload["loss"] = loss_to_dict(betti_matching_loss(res))
            payload["feature_count"] = feature_count_to_dict(feature_count_metric(res))
        if args.targets:
            payload["targets"] = targets_to_dict(critical_voxels(res, grid_i, grid_j))
        return dumps_canonical(payload)

    res, body = _stable_repeat(compute, serialize, args.repeat)
    if args.verify:
        _verify_matching(grid_i, grid_j, res, dims)
        print("oracle: match", file=sys.stderr)
    if args.timings:
        payload = matching_to_dict(res, timings=True)
        if args.loss or args.targets:
            payload["loss"] = loss_to_dict(betti_matching_loss(res))
            payload["feature_count"] = feature_count_to_dict(feature_count_metric(res))
        if args.targets:
            payload["targets"] = targets_to_dict(critical_voxels(res, grid_i, grid_j))
        body = dumps_canonical(payload)
    _emit(body, args.output)
    return 0


def _cmd_bench(args) -> int:
    dims = _parse_dims(args.dims)
    cfg = _config(args)
    grid_i = _load(args, args.volume_i)
    grid_j = _load(args, args.volume_j) if args.volume_j else None

    def run(config):
        if grid_j is None:
            out = compute_barcode(grid_i, dims=dims, config=config)
            return out, dumps_canonical(barcode_to_dict(out))
        out = compute_betti_matching(
            grid_i,
            grid_j,
            dims=dims,
            config=config,
            include_reverse_pairs=not args.no_reverse_pairs,
        )
        return out, dumps_canonical(matching_to_dict(out))

    # Timings vary between runs; results must not.  Every sample is
    # checked against a default-flags reference, so benchmarking a
    # --no-<opt> ladder doubles as an equivalence test.
    _, reference = run(EngineConfig(threads=args.threads))
    stage_samples: dict[str, list[float]] = {}
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        out, body = run(cfg)
        stage_samples.setdefault("wall", []).append(time.perf_counter() - t0)
        if body != reference:
            raise RuntimeError("benchmark run differs from default-flags result")
        for key, val in out.timings.items():
            stage_samples.setdefault(key, []).append(val)
    lines = [f"{'stage':<14} {'mean [s]':>10} {'stddev':>10} {'n':>4}"]
    for key in sorted(stage_samples):
        vals = stage_samples[key]
        dev = statistics.stdev(vals) if len(vals) > 1 else 0.0
        lines.append(f"{key:<14} {statistics.mean(vals):>10.4f} {dev:>10.4f} {len(vals):>4}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betti",
        description="Persistence barcodes and Betti matching of voxel volumes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bar = sub.add_parser("barcode", help="barcode of one volume")
    p_bar.add_argument("volume")
    _add_common(p_bar)
    p_bar.set_defaults(func=_cmd_barcode)

    p_match = sub.add_parser("match", help="Betti matching of two volumes")
    p_match.add_argument("volume_i")
    p_match.add_argument("volume_j")
    _add_common(p_match)
    p_match.add_argument("--loss", action="store_true", help="include the matching loss")
    p_match.add_argument(
        "--targets",
        action="store_true",
        help="include per-voxel optimization targets (implies --loss)",
    )
    p_match.set_defaults(func=_cmd_match)

    p_bench = sub.add_parser("bench", help="repeat a computation and report timings")
    p_bench.add_argument("volume_i")
    p_bench.add_argument("volume_j", nargs="?", default=None)
    _add_common(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.repeat is None:
        args.repeat = 10 if args.command == "bench" else 1
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"betti: {exc}", file=sys.stderr)
        return 1
    except (
        ShapeError,
        ShapeMismatch,
        FiltrationModeMismatch,
        DominanceViolation,
        SizeGuardError,
        ValueError,
    ) as exc:
        print(f"betti: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, RuntimeError) as exc:
        print(f"betti: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
