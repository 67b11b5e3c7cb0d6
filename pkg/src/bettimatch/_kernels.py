"""Compiled kernels for the persistence engines.

Everything here works on flat int64 slot ids and precomputed rank tables;
cubes only become objects at the module boundaries above.  All kernels
release the GIL so the matching pipelines can run on real threads.

Slot layout: a d-cube at base vertex b (flat C-order index) with type t
occupies slot b*3+t for d in {1, 2} and slot b otherwise.  Rank tables
translate slots to positions in the refined (birth, packed) order of one
grid, so the working-boundary heap can order plain ints.
"""

import numpy as np
from numba import njit

EMPTY = -1


@njit(cache=True, nogil=True)
def _grow64(arr, used):
    out = np.empty(2 * arr.size, np.int64)
    out[:used] = arr[:used]
    return out


@njit(cache=True, nogil=True, inline="always")
def _hpush(heap, n, v):
    heap[n] = v
    i = n
    while i > 0:
        up = (i - 1) >> 1
        if heap[up] < heap[i]:
            heap[up], heap[i] = heap[i], heap[up]
            i = up
        else:
            break
    return n + 1


@njit(cache=True, nogil=True, inline="always")
def _hpop(heap, n):
    v = heap[0]
    n -= 1
    if n > 0:
        heap[0] = heap[n]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= n:
                break
            big = left
            right = left + 1
            if right < n and heap[right] > heap[left]:
                big = right
            if heap[big] > heap[i]:
                heap[i], heap[big] = heap[big], heap[i]
                i = big
            else:
                break
    return v, n


@njit(cache=True, nogil=True, inline="always")
def _hpivot(heap, n):
    """Lazy mod-2 pivot: pop equal entries in pairs, push the survivor back."""
    if n == 0:
        return EMPTY, n
    v, n = _hpop(heap, n)
    while n > 0 and heap[0] == v:
        _, n = _hpop(heap, n)
        if n == 0:
            return EMPTY, n
        v, n = _hpop(heap, n)
    n = _hpush(heap, n, v)
    return v, n


@njit(cache=True, nogil=True, inline="always")
def _hdrain(heap, n, out):
    """Drain into the deduplicated support; returns its length."""
    m = 0
    while n > 0:
        v, n = _hpop(heap, n)
        if n > 0 and heap[0] == v:
            _, n = _hpop(heap, n)
        else:
            out[m] = v
            m += 1
    return m


@njit(cache=True, nogil=True, inline="always")
def _facet_slots(base, t, sy, sx, f4):
    """Facet 1-cube slots of a 2-cube, ascending packed order."""
    if t == 0:  # spans y-z
        f4[0] = base * 3 + 1
        f4[1] = base * 3 + 2
        f4[2] = (base + 1) * 3 + 1
        f4[3] = (base + sy) * 3 + 2
    elif t == 1:  # spans x-z
        f4[0] = base * 3 + 0
        f4[1] = base * 3 + 2
        f4[2] = (base + 1) * 3 + 0
        f4[3] = (base + sx) * 3 + 2
    else:  # spans x-y
        f4[0] = base * 3 + 0
        f4[1] = base * 3 + 1
        f4[2] = (base + sy) * 3 + 0
        f4[3] = (base + sx) * 3 + 1


@njit(cache=True, nogil=True)
def reduce_dim1(
    col_base,
    col_type,
    col_death,
    col_emergent_birth,
    n2,
    n3,
    rank_of_slot,
    birth_by_rank,
    slot_by_rank,
    pivot_of_slot,
    cache_start,
    cache_length,
    arena,
    use_emergent,
    cache_as_list,
    mode,
):
    """Implicit left-to-right reduction of the dim-1 boundary block.

    Columns are 2-cubes in the column grid's refined order; rows are
    1-cubes addressed by rank in the row grid's refined order (for plain
    persistence both grids coincide).  mode: 0 = plain (record pairs with
    distinct endpoint values), 1 = image extended (record every pivot),
    2 = image strict (record only input birth < comparison death).

    Fills pivot_of_slot, cache_* (the caller's ReductionState arrays) and
    returns (pair_rank, pair_col, arena, arena_used).
    """
    ncols = col_base.size
    pair_rank = np.empty(ncols, np.int64)
    pair_col = np.empty(ncols, np.int64)
    npairs = 0
    heap = np.empty(1024, np.int64)
    scratch = np.empty(1024, np.int64)
    outbuf = np.empty(1024, np.int64)
    f4 = np.empty(4, np.int64)
    arena_used = 0
    sy = n3
    sx = n2 * n3
    for i in range(ncols):
        hn = 0
        base = col_base[i]
        t = col_type[i]
        _facet_slots(base, t, sy, sx, f4)
        found_emergent = False
        if use_emergent:
            check = True
            for k in range(3, -1, -1):
                r = rank_of_slot[f4[k]]
                if check and birth_by_rank[r] == col_emergent_birth[i]:
                    check = False
                    if pivot_of_slot[f4[k]] == EMPTY:
                        # youngest facet unclaimed: the column is reduced
                        # already, with this facet as its pivot
                        pivot_of_slot[f4[k]] = i
                        found_emergent = True
                        if mode == 1:
                            pair_rank[npairs] = r
                            pair_col[npairs] = i
                            npairs += 1
                        break
                if hn + 1 > heap.size:
                    heap = _grow64(heap, hn)
                hn = _hpush(heap, hn, r)
        else:
            if hn + 4 > heap.size:
                heap = _grow64(heap, hn)
            for k in range(4):
                hn = _hpush(heap, hn, rank_of_slot[f4[k]])
        if found_emergent:
            continue
        pivot, hn = _hpivot(heap, hn)
        while pivot != EMPTY:
            j = pivot_of_slot[slot_by_rank[pivot]]
            if j == EMPTY:
                break
            cslot = col_base[j] * 3 + col_type[j]
            cs = cache_start[cslot]
            if cs != EMPTY:
                clen = cache_length[cslot]
                while hn + clen > heap.size:
                    heap = _grow64(heap, hn)
                if cache_as_list:
                    for k in range(clen):
                        hn = _hpush(heap, hn, arena[cs + k])
                else:
                    # replay through a scratch queue instead of straight
                    # iteration; same content, queue-shaped access
                    while clen > scratch.size:
                        scratch = _grow64(scratch, 0)
                    sn = 0
                    for k in range(clen):
                        sn = _hpush(scratch, sn, arena[cs + k])
                    while sn > 0:
                        v, sn = _hpop(scratch, sn)
                        hn = _hpush(heap, hn, v)
            else:
                _facet_slots(col_base[j], col_type[j], sy, sx, f4)
                if hn + 4 > heap.size:
                    heap = _grow64(heap, hn)
                for k in range(4):
                    hn = _hpush(heap, hn, rank_of_slot[f4[k]])
            pivot, hn = _hpivot(heap, hn)
        if pivot != EMPTY:
            pivot_of_slot[slot_by_rank[pivot]] = i
            while outbuf.size < hn:
                outbuf = _grow64(outbuf, 0)
            m = _hdrain(heap, hn, outbuf)
            while arena_used + m > arena.size:
                arena = _grow64(arena, arena_used)
            cslot = base * 3 + t
            cache_start[cslot] = arena_used
            cache_length[cslot] = m
            for k in range(m):
                arena[arena_used + k] = outbuf[k]
            arena_used += m
            if mode == 0:
                record = birth_by_rank[pivot] != col_death[i]
            elif mode == 1:
                record = True
            else:
                record = birth_by_rank[pivot] < col_death[i]
            if record:
                pair_rank[npairs] = pivot
                pair_col[npairs] = i
                npairs += 1
    return pair_rank[:npairs].copy(), pair_col[:npairs].copy(), arena, arena_used


@njit(cache=True, nogil=True, inline="always")
def _find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


@njit(cache=True, nogil=True, inline="always")
def _older(birth, a, b):
    """Refined forward order on vertex ids (id order = packed order)."""
    return birth[a] < birth[b] or (birth[a] == birth[b] and a < b)


@njit(cache=True, nogil=True)
def uf_sweep(u_ids, v_ids, edge_val, vert_birth, dual_rule, record_all):
    """Union-find persistence sweep over precomputed edge endpoints.

    dual_rule False: forward elder rule (older root survives, younger
    representative recorded, pair is (vertex birth, edge death); record
    when vertex < edge).  dual_rule True: reverse-time elder rule on dual
    vertices (younger-in-forward-order survives, the forward-older
    representative records the death side of (edge birth, vertex death);
    record when edge < vertex).  record_all bypasses the value filter
    (extended image pairs).
    """
    nvert = vert_birth.size
    parent = np.arange(nvert)
    m = u_ids.size
    pair_vert = np.empty(m, np.int64)
    pair_edge = np.empty(m, np.int64)
    merged = np.zeros(m, np.bool_)
    npairs = 0
    for e in range(m):
        ru = _find(parent, u_ids[e])
        rv = _find(parent, v_ids[e])
        if ru == rv:
            continue
        if _older(vert_birth, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        if dual_rule:
            parent[older] = younger
            rec = older
        else:
            parent[younger] = older
            rec = younger
        merged[e] = True
        if dual_rule:
            hit = edge_val[e] < vert_birth[rec]
        else:
            hit = vert_birth[rec] < edge_val[e]
        if record_all or hit:
            pair_vert[npairs] = rec
            pair_edge[npairs] = e
            npairs += 1
    return pair_vert[:npairs].copy(), pair_edge[:npairs].copy(), merged, parent


@njit(cache=True, nogil=True)
def uf_sweep_joint2(u_ids, v_ids, edge_birth, vert_input, vert_image, record_all):
    """Fused dual sweep: input pairs and image pairs in one pass.

    Both forests see the same edges (reverse refined order of the input),
    so they merge identically; only the representative bookkeeping
    differs.  vert_input holds input-grid dual-vertex births, vert_image
    comparison-grid ones.
    """
    nvert = vert_input.size
    parent_a = np.arange(nvert)
    parent_b = np.arange(nvert)
    m = u_ids.size
    pv_a = np.empty(m, np.int64)
    pe_a = np.empty(m, np.int64)
    na = 0
    pv_b = np.empty(m, np.int64)
    pe_b = np.empty(m, np.int64)
    nb = 0
    merged = np.zeros(m, np.bool_)
    for e in range(m):
        ru = _find(parent_a, u_ids[e])
        rv = _find(parent_a, v_ids[e])
        if ru == rv:
            continue
        merged[e] = True
        if _older(vert_input, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        parent_a[older] = younger
        if edge_birth[e] < vert_input[older]:
            pv_a[na] = older
            pe_a[na] = e
            na += 1
        ru = _find(parent_b, u_ids[e])
        rv = _find(parent_b, v_ids[e])
        if _older(vert_image, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        parent_b[older] = younger
        if record_all or edge_birth[e] < vert_image[older]:
            pv_b[nb] = older
            pe_b[nb] = e
            nb += 1
    return pv_a[:na].copy(), pe_a[:na].copy(), pv_b[:nb].copy(), pe_b[:nb].copy(), merged


@njit(cache=True, nogil=True)
def uf_sweep_joint3(u_ids, v_ids, edge_death, vert_c, vert_i, vert_j, record_all):
    """Fused vertex sweep over the comparison's edges.

    Emits the comparison's dim-0 pairs plus the image dim-0 pairs of both
    inputs; all three union-finds traverse the same edge order.
    """
    nvert = vert_c.size
    parent_c = np.arange(nvert)
    parent_i = np.arange(nvert)
    parent_j = np.arange(nvert)
    m = u_ids.size
    pv_c = np.empty(m, np.int64)
    pe_c = np.empty(m, np.int64)
    nc = 0
    pv_i = np.empty(m, np.int64)
    pe_i = np.empty(m, np.int64)
    ni = 0
    pv_j = np.empty(m, np.int64)
    pe_j = np.empty(m, np.int64)
    nj = 0
    merged = np.zeros(m, np.bool_)
    for e in range(m):
        ru = _find(parent_c, u_ids[e])
        rv = _find(parent_c, v_ids[e])
        if ru == rv:
            continue
        merged[e] = True
        if _older(vert_c, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        parent_c[younger] = older
        if vert_c[younger] < edge_death[e]:
            pv_c[nc] = younger
            pe_c[nc] = e
            nc += 1
        ru = _find(parent_i, u_ids[e])
        rv = _find(parent_i, v_ids[e])
        if _older(vert_i, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        parent_i[younger] = older
        if record_all or vert_i[younger] < edge_death[e]:
            pv_i[ni] = younger
            pe_i[ni] = e
            ni += 1
        ru = _find(parent_j, u_ids[e])
        rv = _find(parent_j, v_ids[e])
        if _older(vert_j, ru, rv):
            older, younger = ru, rv
        else:
            older, younger = rv, ru
        parent_j[younger] = older
        if record_all or vert_j[younger] < edge_death[e]:
            pv_j[nj] = younger
            pe_j[nj] = e
            nj += 1
    return (
        pv_c[:nc].copy(),
        pe_c[:nc].copy(),
        pv_i[:ni].copy(),
        pe_i[:ni].copy(),
        pv_j[:nj].copy(),
        pe_j[:nj].copy(),
        merged,
        parent_c,
    )


def warm_up():
    """Trigger compilation of all kernels on tiny inputs."""
    i8 = np.int64
    z4 = np.zeros(1, i8)
    f1 = np.zeros(1, np.float64)
    reduce_dim1(
        np.zeros(0, i8), np.zeros(0, np.int8), np.zeros(0, np.float64),
        np.zeros(0, np.float64), i8(1), i8(1),
        z4, f1, z4, z4.copy(), z4.copy(), z4.copy(), np.zeros(4, i8),
        True, True, 0,
    )
    u = np.zeros(1, i8)
    v = np.ones(1, i8)
    vb = np.zeros(2, np.float64)
    uf_sweep(u, v, f1, vb, False, False)
    uf_sweep(u, v, f1, vb, True, True)
    uf_sweep_joint2(u, v, f1, vb, vb, False)
    uf_sweep_joint3(u, v, f1, vb, vb, vb, False)
