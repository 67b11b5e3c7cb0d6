"""Betti matching of two grids through their pointwise comparison volume.

Both grids include (in filtration order) into the volume that takes the
pointwise earlier value of the two.  A comparison interval whose image
anchors resolve to finite intervals in both inputs certifies that those
two intervals describe the same feature; everything else stays
unmatched.  Essential classes never participate and are reported
separately.

Five computations feed the match: both input barcodes, the comparison
barcode, and both image computations into the comparison.  They run as
tasks on a thread pool (the kernels release the GIL); with
comparison-side clearing enabled the image tasks wait for the
comparison's survivor lists, otherwise they start immediately.  The
fused union-find variants fold the image sweeps into sweeps that walk
the same edge order anyway.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .grid import Cube, GridComplex, cube_order_key
from .image import (
    ComparisonHandoff,
    FiltrationModeMismatch,
    ShapeMismatch,
    image_bundle,
)
from .persistence import (
    Bar,
    _check_dims,
    _original_cube,
    compute_volume_bundle,
    dim0_sweep,
    dual_vertex_births,
    finalize_bars,
    finalize_essential,
    sorted_cells,
)
from .volume_io import SUPERLEVEL, VoxelGrid, internal_values


@dataclass(frozen=True)
class MatchedPair:
    dim: int
    bar_i: Bar
    bar_j: Bar


@dataclass
class BettiMatchingResult:
    shape: tuple[int, int, int]
    filtration_mode: str
    dims: tuple[int, ...]
    include_reverse_pairs: bool
    matched: dict[int, list[MatchedPair]] = field(default_factory=dict)
    unmatched_i: dict[int, list[Bar]] = field(default_factory=dict)
    unmatched_j: dict[int, list[Bar]] = field(default_factory=dict)
    essential_i: dict[int, list[Bar]] = field(default_factory=dict)
    essential_j: dict[int, list[Bar]] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def n_matched(self, dim: int) -> int:
        return len(self.matched.get(dim, []))

    def n_unmatched(self, dim: int) -> tuple[int, int]:
        return (
            len(self.unmatched_i.get(dim, [])),
            len(self.unmatched_j.get(dim, [])),
        )


def comparison_volume(grid_i: VoxelGrid, grid_j: VoxelGrid) -> VoxelGrid:
    """The pointwise filtration-earlier combination of two grids.

    Sublevel grids combine by minimum, superlevel grids by maximum; both
    inputs include into the result.
    """
    _check_pair(grid_i, grid_j)
    vc = np.minimum(internal_values(grid_i), internal_values(grid_j))
    if grid_i.filtration_mode == SUPERLEVEL:
        vc = -vc
    return VoxelGrid(vc, filtration_mode=grid_i.filtration_mode)


def _check_pair(grid_i: VoxelGrid, grid_j: VoxelGrid) -> None:
    if grid_i.shape != grid_j.shape:
        raise ShapeMismatch(f"shapes differ: {grid_i.shape} vs {grid_j.shape}")
    if grid_i.filtration_mode != grid_j.filtration_mode:
        raise FiltrationModeMismatch(
            f"filtration modes differ: {grid_i.filtration_mode!r}"
            f" vs {grid_j.filtration_mode!r}"
        )


class _Done:
    def __init__(self, value):
        self._value = value

    def result(self):
        return self._value


class _Runner:
    def __init__(self, pool: ThreadPoolExecutor | None):
        self._pool = pool

    def submit(self, fn, *args):
        if self._pool is None:
            return _Done(fn(*args))
        return self._pool.submit(fn, *args)


def _bar(pair: tuple[Cube, Cube], dim: int, mode: str) -> Bar:
    negate = mode == SUPERLEVEL
    ob = _original_cube(pair[0], negate)
    od = _original_cube(pair[1], negate)
    return Bar(dim, ob.birth, od.birth, ob, od)


def compute_betti_matching(
    grid_i: VoxelGrid,
    grid_j: VoxelGrid,
    dims=None,
    config: EngineConfig | None = None,
    include_reverse_pairs: bool = True,
) -> BettiMatchingResult:
    """Match the finite intervals of two grids of equal shape and mode.

    ``include_reverse_pairs`` keeps the extended image pairs as anchors;
    turning it off restricts anchoring to strict image intervals, which
    can only reduce the match.
    """
    cfg = config or EngineConfig()
    dims = _check_dims(dims)
    _check_pair(grid_i, grid_j)
    t_start = time.perf_counter()
    mode = grid_i.filtration_mode
    vi = internal_values(grid_i)
    vj = internal_values(grid_j)
    cx_i = GridComplex(vi)
    cx_j = GridComplex(vj)
    cx_c = GridComplex(np.minimum(vi, vj))
    rank = cx_i.rank
    top_dim = 2 if rank == 3 else 1
    extended = include_reverse_pairs
    use_joint = cfg.joint_unionfind
    need_top_image = rank >= 2 and top_dim in dims
    dual_c = dual_vertex_births(cx_c) if need_top_image else None

    timings: dict[str, float] = {}

    def timed(key, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        timings[key] = time.perf_counter() - t0
        return out

    def task_input(cx):
        return compute_volume_bundle(
            cx,
            dims,
            cfg,
            image_dual_births=dual_c if (use_joint and need_top_image) else None,
            image_record_all=extended,
        )

    def task_cmp():
        bundle, _ = compute_volume_bundle(
            cx_c,
            dims,
            cfg,
            want_essential=False,
            want_dim0=False,
            force_dual=cfg.comparison_clearing and rank == 3 and 1 in dims,
        )
        return bundle

    def task_image(cx_in, handoff):
        return image_bundle(
            cx_in,
            cx_c,
            dims,
            extended,
            cfg,
            handoff=handoff,
            skip_top=use_joint,
            skip_dim0=use_joint,
        )

    def task_dim0(cmp_bundle):
        bases, types, deaths = sorted_cells(cx_c, 1, cfg)
        creators = cmp_bundle.edge_creator_slots
        if cfg.clearing and creators is not None:
            keep = ~creators[bases * 3 + types]
            bases, types, deaths = bases[keep], types[keep], deaths[keep]
        joint = (vi.ravel(), vj.ravel()) if use_joint else None
        sweep = dim0_sweep(
            cx_c,
            bases,
            types,
            deaths,
            cx_c.values.ravel(),
            cfg,
            joint_births=joint,
            joint_record_all=extended,
        )
        return sweep.pairs, sweep.image_pairs_i, sweep.image_pairs_j

    pool = ThreadPoolExecutor(max_workers=cfg.resolved_threads()) if cfg.parallel else None
    try:
        run = _Runner(pool)
        f_in_i = run.submit(timed, "input_i", task_input, cx_i)
        f_in_j = run.submit(timed, "input_j", task_input, cx_j)
        f_cmp = run.submit(timed, "comparison", task_cmp)
        f_img_i = f_img_j = None
        if not cfg.comparison_clearing:
            f_img_i = run.submit(timed, "image_i", task_image, cx_i, None)
            f_img_j = run.submit(timed, "image_j", task_image, cx_j, None)
        cmp_bundle = f_cmp.result()
        if cfg.comparison_clearing:
            handoff = ComparisonHandoff(
                cols2_keep=cmp_bundle.cleared_cols2,
                edge_creator_slots=cmp_bundle.edge_creator_slots,
            )
            f_img_i = run.submit(timed, "image_i", task_image, cx_i, handoff)
            f_img_j = run.submit(timed, "image_j", task_image, cx_j, handoff)
        f_dim0 = run.submit(timed, "dim0", task_dim0, cmp_bundle) if 0 in dims else None
        bundle_i, img_top_i = f_in_i.result()
        bundle_j, img_top_j = f_in_j.result()
        image_i = f_img_i.result()
        image_j = f_img_j.result()
        if use_joint and need_top_image:
            image_i[top_dim] = img_top_i or []
            image_j[top_dim] = img_top_j or []
        if f_dim0 is not None:
            cmp_pairs0, img0_i, img0_j = f_dim0.result()
            cmp_bundle.pairs[0] = cmp_pairs0
            if use_joint:
                image_i[0] = img0_i or []
                image_j[0] = img0_j or []
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    result = BettiMatchingResult(
        shape=cx_i.shape,
        filtration_mode=mode,
        dims=dims,
        include_reverse_pairs=include_reverse_pairs,
    )
    timings["sort"] = sum(
        b.timings.get("sort", 0.0) for b in (bundle_i, bundle_j, cmp_bundle)
    )
    t_asm = time.perf_counter()
    for d in dims:
        pairs_i = bundle_i.pairs.get(d, [])
        pairs_j = bundle_j.pairs.get(d, [])
        by_birth_i = {p[0].packed: k for k, p in enumerate(pairs_i)}
        by_birth_j = {p[0].packed: k for k, p in enumerate(pairs_j)}
        by_death_i = {dc.packed: bc for bc, dc in image_i.get(d, [])}
        by_death_j = {dc.packed: bc for bc, dc in image_j.get(d, [])}
        used_i: set[int] = set()
        used_j: set[int] = set()
        hits: list[tuple[int, int]] = []
        for bc, dc in cmp_bundle.pairs.get(d, []):
            anchor_i = by_death_i.get(dc.packed)
            anchor_j = by_death_j.get(dc.packed)
            if anchor_i is None or anchor_j is None:
                continue
            ki = by_birth_i.get(anchor_i.packed)
            kj = by_birth_j.get(anchor_j.packed)
            if ki is None or kj is None:
                continue
            hits.append((ki, kj))
            used_i.add(ki)
            used_j.add(kj)
        hits.sort(key=lambda t: cube_order_key(pairs_i[t[0]][0]))
        result.matched[d] = [
            MatchedPair(d, _bar(pairs_i[ki], d, mode), _bar(pairs_j[kj], d, mode))
            for ki, kj in hits
        ]
        result.unmatched_i[d] = finalize_bars(
            [p for k, p in enumerate(pairs_i) if k not in used_i], d, mode
        )
        result.unmatched_j[d] = finalize_bars(
            [p for k, p in enumerate(pairs_j) if k not in used_j], d, mode
        )
        result.essential_i[d] = finalize_essential(
            bundle_i.essential.get(d, []), d, mode
        )
        result.essential_j[d] = finalize_essential(
            bundle_j.essential.get(d, []), d, mode
        )
    timings["assembly"] = time.perf_counter() - t_asm
    timings["total"] = time.perf_counter() - t_start
    result.timings = timings
    return result
