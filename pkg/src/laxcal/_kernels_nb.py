"""Numba-jitted implementations of the hot kernels (default backend).

Must stay observationally identical to `_kernels_py`, element numbering
included.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_ROW_BUDGET = 1
STATUS_TABLE_BUDGET = 2

_FNV_OFFSET = np.uint64(14695981039346656037)
_FNV_PRIME = np.uint64(1099511628211)


@njit(cache=True)
def _find(parent, x):
    r = x
    while parent[r] != r:
        r = parent[r]
    while parent[x] != r:
        nxt = parent[x]
        parent[x] = r
        x = nxt
    return r


@njit(cache=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return False
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb
    return True


@njit(cache=True)
def cg_closure(n, arities, offsets, tables, seed_a, seed_b):
    parent = np.arange(n, dtype=np.int64)
    for i in range(seed_a.shape[0]):
        _union(parent, seed_a[i], seed_b[i])
    n_ops = arities.shape[0]
    digs = np.zeros(16, dtype=np.int64)
    while True:
        changed = False
        for t in range(n_ops):
            k = arities[t]
            off = offsets[t]
            if k == 0:
                continue
            if k == 1:
                for a in range(n):
                    r = _find(parent, a)
                    if r != a:
                        if _union(parent, tables[off + a], tables[off + r]):
                            changed = True
            elif k == 2:
                for a in range(n):
                    r = _find(parent, a)
                    if r == a:
                        continue
                    for c in range(n):
                        if _union(parent, tables[off + a * n + c], tables[off + r * n + c]):
                            changed = True
                        if _union(parent, tables[off + c * n + a], tables[off + c * n + r]):
                            changed = True
            else:
                rest = 1
                for _ in range(k - 1):
                    rest *= n
                for p in range(k):
                    for a in range(n):
                        r = _find(parent, a)
                        if r == a:
                            continue
                        for code in range(rest):
                            cc = code
                            for q in range(k - 1, -1, -1):
                                if q == p:
                                    continue
                                digs[q] = cc % n
                                cc //= n
                            ia = 0
                            ir = 0
                            for q in range(k):
                                if q == p:
                                    ia = ia * n + a
                                    ir = ir * n + r
                                else:
                                    ia = ia * n + digs[q]
                                    ir = ir * n + digs[q]
                            if _union(parent, tables[off + ia], tables[off + ir]):
                                changed = True
        if not changed:
            break
    labels = np.empty(n, dtype=np.int32)
    for i in range(n):
        labels[i] = _find(parent, i)
    return labels


@njit(cache=True)
def _hash_buf(buf, n_coords):
    h = _FNV_OFFSET
    for c in range(n_coords):
        h = (h ^ np.uint64(buf[c])) * _FNV_PRIME
    return h


@njit(cache=True)
def _probe(hkeys, rows, buf, n_coords, mask):
    """Return the slot holding this row's index, or the free slot for it."""
    h = _hash_buf(buf, n_coords)
    slot = np.int64(h & np.uint64(mask))
    while True:
        ent = hkeys[slot]
        if ent < 0:
            return slot
        ok = True
        for c in range(n_coords):
            if rows[ent, c] != buf[c]:
                ok = False
                break
        if ok:
            return slot
        slot = (slot + 1) & mask


@njit(cache=True)
def _apply_op(buf, rows, args, n_args, t, coord_factor, factor_sizes, fact_offsets,
              tables, n_coords):
    for c in range(n_coords):
        f = coord_factor[c]
        s = factor_sizes[f]
        base = fact_offsets[f, t]
        idx = np.int64(0)
        for j in range(n_args):
            idx = idx * s + rows[args[j], c]
        buf[c] = tables[base + idx]


@njit(cache=True)
def close_product(coord_factor, factor_sizes, arities, fact_offsets, tables, seeds,
                  max_rows, build_tables, max_table_cells):
    n_coords = coord_factor.shape[0]
    n_ops = arities.shape[0]
    max_arity = 0
    for t in range(n_ops):
        if arities[t] > max_arity:
            max_arity = arities[t]
    pw = max(1, max_arity)

    cap = 16
    if seeds.shape[0] > cap:
        cap = seeds.shape[0]
    rows = np.empty((cap, n_coords), dtype=np.int32)
    parent_op = np.empty(cap, dtype=np.int32)
    parent_args = np.empty((cap, pw), dtype=np.int32)
    hsize = np.int64(64)
    while hsize < 4 * cap:
        hsize *= 2
    hkeys = np.full(hsize, -1, dtype=np.int64)
    mask = hsize - 1
    count = 0

    buf = np.empty(n_coords, dtype=np.int32)
    args = np.empty(pw, dtype=np.int64)
    seed_idx = np.empty(seeds.shape[0], dtype=np.int32)
    empty_tables = np.empty(0, dtype=np.int32)
    empty_offsets = np.zeros(1, dtype=np.int64)

    # phase 0 encodes what is being inserted: 0 seeds, 1 constants, 2 layers
    overflow = False
    for phase in range(3):
        if overflow:
            break
        if phase == 0:
            src_total = seeds.shape[0]
        elif phase == 1:
            src_total = n_ops
        else:
            src_total = 1  # the layer loop manages its own iteration below
        if phase < 2:
            for si in range(src_total):
                if phase == 0:
                    for c in range(n_coords):
                        buf[c] = seeds[si, c]
                    op_tag = -1
                else:
                    if arities[si] != 0:
                        continue
                    _apply_op(buf, rows, args, 0, si, coord_factor, factor_sizes,
                              fact_offsets, tables, n_coords)
                    op_tag = si
                slot = _probe(hkeys, rows, buf, n_coords, mask)
                if hkeys[slot] >= 0:
                    if phase == 0:
                        seed_idx[si] = hkeys[slot]
                    continue
                if count >= max_rows:
                    overflow = True
                    break
                if count == cap:
                    newcap = cap * 2
                    nrows = np.empty((newcap, n_coords), dtype=np.int32)
                    nop = np.empty(newcap, dtype=np.int32)
                    nargs = np.empty((newcap, pw), dtype=np.int32)
                    nrows[:cap] = rows[:cap]
                    nop[:cap] = parent_op[:cap]
                    nargs[:cap] = parent_args[:cap]
                    rows = nrows
                    parent_op = nop
                    parent_args = nargs
                    cap = newcap
                    hsize = hsize * 2
                    hkeys = np.full(hsize, -1, dtype=np.int64)
                    mask = hsize - 1
                    buf2 = np.empty(n_coords, dtype=np.int32)
                    for i in range(count):
                        for c in range(n_coords):
                            buf2[c] = rows[i, c]
                        s2 = _probe(hkeys, rows, buf2, n_coords, mask)
                        hkeys[s2] = i
                    slot = _probe(hkeys, rows, buf, n_coords, mask)
                rows[count] = buf
                parent_op[count] = op_tag
                for j in range(pw):
                    parent_args[count, j] = -1
                if phase == 0:
                    parent_args[count, 0] = si
                    seed_idx[si] = count
                hkeys[slot] = count
                count += 1
            continue

        # phase 2: BFS layers over operations of arity >= 1
        fresh_lo = 0
        known = count
        while True:
            for t in range(n_ops):
                k = arities[t]
                if k == 0:
                    continue
                n_tuples = np.int64(1)
                for _ in range(k):
                    n_tuples *= known
                for code in range(n_tuples):
                    cc = code
                    fresh = False
                    for q in range(k - 1, -1, -1):
                        d = cc % known
                        cc //= known
                        args[q] = d
                        if d >= fresh_lo:
                            fresh = True
                    if not fresh:
                        continue
                    _apply_op(buf, rows, args, k, t, coord_factor, factor_sizes,
                              fact_offsets, tables, n_coords)
                    slot = _probe(hkeys, rows, buf, n_coords, mask)
                    if hkeys[slot] >= 0:
                        continue
                    if count >= max_rows:
                        return (rows[:count].copy(), parent_op[:count].copy(),
                                parent_args[:count].copy(), seed_idx, empty_tables,
                                empty_offsets, STATUS_ROW_BUDGET)
                    if count == cap:
                        newcap = cap * 2
                        nrows = np.empty((newcap, n_coords), dtype=np.int32)
                        nop = np.empty(newcap, dtype=np.int32)
                        nargs = np.empty((newcap, pw), dtype=np.int32)
                        nrows[:cap] = rows[:cap]
                        nop[:cap] = parent_op[:cap]
                        nargs[:cap] = parent_args[:cap]
                        rows = nrows
                        parent_op = nop
                        parent_args = nargs
                        cap = newcap
                        hsize = hsize * 2
                        hkeys = np.full(hsize, -1, dtype=np.int64)
                        mask = hsize - 1
                        buf2 = np.empty(n_coords, dtype=np.int32)
                        for i in range(count):
                            for c in range(n_coords):
                                buf2[c] = rows[i, c]
                            s2 = _probe(hkeys, rows, buf2, n_coords, mask)
                            hkeys[s2] = i
                        slot = _probe(hkeys, rows, buf, n_coords, mask)
                    rows[count] = buf
                    parent_op[count] = t
                    for j in range(pw):
                        parent_args[count, j] = -1
                    for j in range(k):
                        parent_args[count, j] = args[j]
                    hkeys[slot] = count
                    count += 1
            if count == known:
                break
            fresh_lo = known
            known = count

    if overflow:
        return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
                seed_idx, empty_tables, empty_offsets, STATUS_ROW_BUDGET)

    out_offsets = np.zeros(n_ops + 1, dtype=np.int64)
    if not build_tables:
        return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
                seed_idx, empty_tables, out_offsets, STATUS_OK)

    total = np.int64(0)
    for t in range(n_ops):
        cells = np.int64(1)
        for _ in range(arities[t]):
            cells *= count
        out_offsets[t] = total
        total += cells
    out_offsets[n_ops] = total
    if total > max_table_cells:
        return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
                seed_idx, empty_tables, np.zeros(1, dtype=np.int64), STATUS_TABLE_BUDGET)
    out_tables = np.empty(total, dtype=np.int32)
    for t in range(n_ops):
        k = arities[t]
        base = out_offsets[t]
        n_cells = np.int64(1)
        for _ in range(k):
            n_cells *= count
        for code in range(n_cells):
            cc = code
            for q in range(k - 1, -1, -1):
                args[q] = cc % count
                cc //= count
            _apply_op(buf, rows, args, k, t, coord_factor, factor_sizes, fact_offsets,
                      tables, n_coords)
            slot = _probe(hkeys, rows, buf, n_coords, mask)
            out_tables[base + code] = hkeys[slot]
    return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
            seed_idx, out_tables, out_offsets, STATUS_OK)
