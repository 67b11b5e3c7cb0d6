"""Training signals derived from a matching result.

The loss pulls matched intervals onto each other and shrinks unmatched
ones onto the diagonal:

    sum over matched (p, q) of  2*[(b_p - b_q)^2 + (d_p - d_q)^2]
  + sum over unmatched p of     (b_p - d_p)^2

Essential intervals contribute nothing.  Interval endpoints are voxel
values, so the loss differentiates through the critical voxels: each
endpoint traces back to the vertex that gave its cube its filtration
value.  `critical_voxels` reports one (voxel, target, weight) entry per
endpoint; the derivative of the loss with respect to a voxel's value is
the sum of 2*weight*(value - target) over that voxel's entries.  With
every weight equal to 2 the identity

    sum of weight*(value - target)^2 over one volume's entries
      = that volume's matched terms + its unmatched terms

holds exactly, so the entries can be consumed as a stand-alone quadratic
objective per volume.  For an unmatched interval both endpoints target
the interval midpoint: weight 2 turns the chain rule's half into the
(b - d)^2 slope.

On binary superlevel grids every finite interval is [1, 0), matched
terms vanish, and the loss counts the unmatched intervals of both
volumes exactly.
"""

from dataclasses import dataclass

from .grid import Cube, GridComplex
from .matching import BettiMatchingResult
from .persistence import Bar
from .volume_io import VoxelGrid, internal_values


@dataclass(frozen=True)
class LossBreakdown:
    matched: float
    unmatched_i: float
    unmatched_j: float

    @property
    def total(self) -> float:
        return self.matched + self.unmatched_i + self.unmatched_j


def betti_matching_loss(result: BettiMatchingResult) -> LossBreakdown:
    """Loss of a matching result, in the grids' original units.

    Squared differences in original units equal those in internal
    orientation, so no mapping is needed here.
    """
    matched = 0.0
    for d in result.dims:
        for pair in result.matched.get(d, []):
            db = pair.bar_i.birth - pair.bar_j.birth
            dd = pair.bar_i.death - pair.bar_j.death
            matched += 2.0 * (db * db + dd * dd)
    u_i = sum(
        (b.birth - b.death) ** 2
        for d in result.dims
        for b in result.unmatched_i.get(d, [])
    )
    u_j = sum(
        (b.birth - b.death) ** 2
        for d in result.dims
        for b in result.unmatched_j.get(d, [])
    )
    return LossBreakdown(matched=matched, unmatched_i=float(u_i), unmatched_j=float(u_j))


@dataclass(frozen=True)
class VoxelTarget:
    """One endpoint's pull: move ``voxel`` from ``current`` toward ``target``.

    The loss contribution is weight*(current - target)^2 and its
    derivative with respect to the voxel value 2*weight*(current-target).
    """

    voxel: tuple[int, int, int]
    current: float
    target: float
    weight: float
    dim: int
    endpoint: str  # "birth" or "death"
    matched: bool


@dataclass
class CriticalVoxelReport:
    targets_i: list[VoxelTarget]
    targets_j: list[VoxelTarget]

    def volume_loss(self, side: str) -> float:
        ts = self.targets_i if side == "i" else self.targets_j
        return sum(t.weight * (t.current - t.target) ** 2 for t in ts)


def critical_vertex(cx: GridComplex, cube: Cube, dim: int) -> tuple[int, int, int]:
    """The vertex that set the cube's filtration value.

    Maximum over the cube's vertices in internal orientation; ties break
    toward the earliest vertex in packed order.
    """
    best = None
    best_val = None
    for vx in cx.vertices_of(cube, dim):
        val = cx.values[vx]
        if best is None or val > best_val or (val == best_val and vx < best):
            best, best_val = vx, val
    return best


def _entries(
    bars_own: list[tuple[Bar, Bar | None]],
    cx: GridComplex,
    grid: VoxelGrid,
) -> list[VoxelTarget]:
    out = []
    for bar, partner in bars_own:
        bv = critical_vertex(cx, bar.birth_cube, bar.dim)
        dv = critical_vertex(cx, bar.death_cube, bar.dim + 1)
        if partner is not None:
            tb, td = partner.birth, partner.death
            matched = True
        else:
            tb = td = 0.5 * (bar.birth + bar.death)
            matched = False
        val = grid.values
        out.append(VoxelTarget(bv, float(val[bv]), tb, 2.0, bar.dim, "birth", matched))
        out.append(VoxelTarget(dv, float(val[dv]), td, 2.0, bar.dim, "death", matched))
    return out


def critical_voxels(
    result: BettiMatchingResult,
    grid_i: VoxelGrid,
    grid_j: VoxelGrid,
) -> CriticalVoxelReport:
    """Voxel-level targets realizing the matching loss, original units.

    Matched intervals produce entries in both volumes, each endpoint
    targeting the partner interval's endpoint; unmatched intervals
    target their own midpoint.  Essential intervals produce nothing.
    """
    cx_i = GridComplex(internal_values(grid_i))
    cx_j = GridComplex(internal_values(grid_j))
    own_i: list[tuple[Bar, Bar | None]] = []
    own_j: list[tuple[Bar, Bar | None]] = []
    for d in result.dims:
        for pair in result.matched.get(d, []):
            own_i.append((pair.bar_i, pair.bar_j))
            own_j.append((pair.bar_j, pair.bar_i))
        own_i.extend((b, None) for b in result.unmatched_i.get(d, []))
        own_j.extend((b, None) for b in result.unmatched_j.get(d, []))
    return CriticalVoxelReport(
        targets_i=_entries(own_i, cx_i, grid_i),
        targets_j=_entries(own_j, cx_j, grid_j),
    )


def feature_count_metric(result: BettiMatchingResult) -> dict[int, int]:
    """Per-dimension absolute difference of total interval counts.

    Counts include finite and essential intervals.  On binary grids this
    is the Betti number error; it never exceeds the matching loss there,
    since each side's surplus intervals are necessarily unmatched.
    """
    out = {}
    for d in result.dims:
        n_i = (
            result.n_matched(d)
            + len(result.unmatched_i.get(d, []))
            + len(result.essential_i.get(d, []))
        )
        n_j = (
            result.n_matched(d)
            + len(result.unmatched_j.get(d, []))
            + len(result.essential_j.get(d, []))
        )
        out[d] = abs(n_i - n_j)
    return out
