"""The loss value, its per-voxel decomposition, and the gradient targets."""

import numpy as np
import pytest

from bettimatch.grid import GridComplex
from bettimatch.loss import (
    betti_matching_loss,
    critical_vertex,
    critical_voxels,
    feature_count_metric,
)
from bettimatch.matching import compute_betti_matching
from bettimatch.volume_io import SUBLEVEL, SUPERLEVEL, VoxelGrid, internal_values

from conftest import binary_volume, continuous_volume, integer_volume


def matching_with_loss(rng, shape=(5, 5, 5), maker=continuous_volume, mode=SUBLEVEL):
    grid_i = VoxelGrid(maker(rng, shape), mode)
    grid_j = VoxelGrid(maker(rng, shape), mode)
    res = compute_betti_matching(grid_i, grid_j)
    return grid_i, grid_j, res


def test_self_match_loss_is_zero(rng):
    grid = VoxelGrid(continuous_volume(rng, (5, 5, 5)))
    res = compute_betti_matching(grid, grid)
    breakdown = betti_matching_loss(res)
    assert breakdown.total == 0.0
    report = critical_voxels(res, grid, grid)
    assert all(t.current == t.target for t in report.targets_i + report.targets_j)


def test_loss_formula_recomputed_from_bars(rng):
    _, _, res = matching_with_loss(rng)
    breakdown = betti_matching_loss(res)
    matched = sum(
        2.0 * ((p.bar_i.birth - p.bar_j.birth) ** 2 + (p.bar_i.death - p.bar_j.death) ** 2)
        for d in res.dims
        for p in res.matched[d]
    )
    assert breakdown.matched == pytest.approx(matched, abs=0)
    assert breakdown.total == breakdown.matched + breakdown.unmatched_i + breakdown.unmatched_j
    assert breakdown.unmatched_i >= 0 and breakdown.unmatched_j >= 0


@pytest.mark.parametrize("mode", [SUBLEVEL, SUPERLEVEL])
def test_voxel_targets_recompose_the_loss(mode, rng):
    """Summing weight*(current-target)^2 over one volume's targets gives
    that volume's share: all matched terms plus its own unmatched terms."""
    grid_i, grid_j, res = matching_with_loss(rng, mode=mode)
    breakdown = betti_matching_loss(res)
    report = critical_voxels(res, grid_i, grid_j)
    assert report.volume_loss("i") == pytest.approx(breakdown.matched + breakdown.unmatched_i, rel=1e-12)
    assert report.volume_loss("j") == pytest.approx(breakdown.matched + breakdown.unmatched_j, rel=1e-12)


def test_target_structure(rng):
    grid_i, grid_j, res = matching_with_loss(rng)
    report = critical_voxels(res, grid_i, grid_j)
    n_bars_i = sum(len(res.matched[d]) + len(res.unmatched_i[d]) for d in res.dims)
    assert len(report.targets_i) == 2 * n_bars_i  # birth entry + death entry
    for side, grid in (("i", grid_i), ("j", grid_j)):
        for t in report.targets_i if side == "i" else report.targets_j:
            assert t.weight == 2.0
            assert grid.values[t.voxel] == t.current
            assert t.endpoint in ("birth", "death")
    # unmatched entries pull both endpoints to the shared midpoint
    for t_birth, t_death in zip(report.targets_i[::2], report.targets_i[1::2]):
        if not t_birth.matched:
            assert t_birth.target == t_death.target == pytest.approx(
                (t_birth.current + t_death.current) / 2.0
            )


def test_matched_targets_point_at_partner_endpoints(rng):
    grid_i, grid_j, res = matching_with_loss(rng)
    report = critical_voxels(res, grid_i, grid_j)
    partner_births = {
        (d, p.bar_i.birth): p.bar_j.birth for d in res.dims for p in res.matched[d]
    }
    for t in report.targets_i:
        if t.matched and t.endpoint == "birth" and (t.dim, t.current) in partner_births:
            assert t.target == partner_births[(t.dim, t.current)]


def test_critical_vertex_realizes_the_value_and_breaks_ties_low(rng):
    values = integer_volume(rng, (5, 5, 5), levels=2)
    cx = GridComplex(values)
    for dim in (1, 2, 3):
        for _ in range(20):
            x = int(rng.integers(0, 4))
            y = int(rng.integers(0, 4))
            z = int(rng.integers(0, 4))
            t = int(rng.integers(0, 3)) if dim in (1, 2) else 0
            try:
                cube = cx.make_cube(x, y, z, t, dim)
            except IndexError:
                continue
            vx = critical_vertex(cx, cube, dim)
            assert cx.values[vx] == cube.birth
            ties = [v for v in cx.vertices_of(cube, dim) if cx.values[v] == cube.birth]
            assert vx == min(ties)


def test_binary_calibration_counts_unmatched(rng):
    """On binary volumes every matched pair aligns exactly, so the loss
    is the plain count of unmatched intervals on both sides."""
    for _ in range(5):
        grid_i = VoxelGrid(binary_volume(rng, (6, 6, 6)), SUPERLEVEL)
        grid_j = VoxelGrid(binary_volume(rng, (6, 6, 6)), SUPERLEVEL)
        res = compute_betti_matching(grid_i, grid_j)
        breakdown = betti_matching_loss(res)
        n_unmatched_i = sum(len(res.unmatched_i[d]) for d in res.dims)
        n_unmatched_j = sum(len(res.unmatched_j[d]) for d in res.dims)
        assert breakdown.matched == 0.0
        assert breakdown.unmatched_i == n_unmatched_i
        assert breakdown.unmatched_j == n_unmatched_j
        assert breakdown.total == n_unmatched_i + n_unmatched_j


def test_gradient_slope_at_reported_voxels(rng):
    """d loss / d voxel = 2*weight*(current - target), probed by central
    finite differences with the matching held fixed (recomputation guards
    against matching flips at the probe point)."""
    eps = 1e-6
    grid_i = VoxelGrid(continuous_volume(rng, (4, 4, 4)))
    grid_j = VoxelGrid(continuous_volume(rng, (4, 4, 4)))
    res = compute_betti_matching(grid_i, grid_j)
    report = critical_voxels(res, grid_i, grid_j)
    by_voxel: dict[tuple, float] = {}
    for t in report.targets_i:
        by_voxel[t.voxel] = by_voxel.get(t.voxel, 0.0) + 2.0 * t.weight * (t.current - t.target)
    checked = 0
    for voxel, grad in list(by_voxel.items())[:12]:
        values_hi = grid_i.values.copy()
        values_hi[voxel] += eps
        values_lo = grid_i.values.copy()
        values_lo[voxel] -= eps
        hi = _loss_with_fixed_structure(values_hi, grid_i, grid_j)
        lo = _loss_with_fixed_structure(values_lo, grid_i, grid_j)
        if hi is None or lo is None:
            continue  # the perturbation flipped the matching; skip the probe
        slope = (hi - lo) / (2 * eps)
        assert slope == pytest.approx(grad, rel=1e-4, abs=1e-6)
        checked += 1
    assert checked >= 5


def _loss_with_fixed_structure(values_i, grid_i, grid_j):
    """Loss after perturbing volume i, or None if the matching changed shape."""
    base = compute_betti_matching(grid_i, grid_j)
    res = compute_betti_matching(VoxelGrid(values_i, grid_i.filtration_mode), grid_j)
    for d in res.dims:
        if len(res.matched[d]) != len(base.matched[d]):
            return None
        if len(res.unmatched_i[d]) != len(base.unmatched_i[d]):
            return None
    return betti_matching_loss(res).total


def test_feature_count_metric(rng):
    grid_i, grid_j, res = matching_with_loss(rng, maker=integer_volume)
    per_dim = feature_count_metric(res)
    for d in res.dims:
        n_i = len(res.matched[d]) + len(res.unmatched_i[d]) + len(res.essential_i[d])
        n_j = len(res.matched[d]) + len(res.unmatched_j[d]) + len(res.essential_j[d])
        assert per_dim[d] == abs(n_i - n_j)


def test_feature_count_bounded_by_loss_on_binary(rng):
    for _ in range(5):
        grid_i = VoxelGrid(binary_volume(rng, (6, 6, 6)), SUPERLEVEL)
        grid_j = VoxelGrid(binary_volume(rng, (6, 6, 6)), SUPERLEVEL)
        res = compute_betti_matching(grid_i, grid_j)
        metric_total = sum(feature_count_metric(res).values())
        assert metric_total <= betti_matching_loss(res).total
