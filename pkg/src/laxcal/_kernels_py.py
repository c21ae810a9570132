"""Pure numpy implementations of the two hot kernels.

Semantics (including element numbering) must match `_kernels_nb` exactly;
`tests/test_kernels.py` holds the two backends side by side.
"""

from __future__ import annotations

import numpy as np

STATUS_OK = 0
STATUS_ROW_BUDGET = 1
STATUS_TABLE_BUDGET = 2


def _find(parent, x):
    r = x
    while parent[r] != r:
        r = parent[r]
    while parent[x] != r:
        parent[x], x = r, parent[x]
    return r


def _union(parent, a, b):
    ra = _find(parent, int(a))
    rb = _find(parent, int(b))
    if ra == rb:
        return False
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb
    return True


def cg_closure(n, arities, offsets, tables, seed_a, seed_b):
    """Least congruence labels containing the seed pairs.

    Union-find seeded with the pairs, then repeated one-coordinate translation
    passes over every operation table until no block merges.  Roots are block
    minima, so the returned labels are already canonical.
    """
    parent = list(range(n))
    for a, b in zip(seed_a, seed_b):
        _union(parent, a, b)
    n_ops = len(arities)
    while True:
        changed = False
        for t in range(n_ops):
            k = int(arities[t])
            off = int(offsets[t])
            if k == 0:
                continue
            if k == 1:
                for a in range(n):
                    r = _find(parent, a)
                    if r != a:
                        changed |= _union(parent, tables[off + a], tables[off + r])
            elif k == 2:
                for a in range(n):
                    r = _find(parent, a)
                    if r == a:
                        continue
                    base_a = off + a * n
                    base_r = off + r * n
                    for c in range(n):
                        changed |= _union(parent, tables[base_a + c], tables[base_r + c])
                        changed |= _union(parent, tables[off + c * n + a], tables[off + c * n + r])
            else:
                rest = n ** (k - 1)
                digs = [0] * k
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
                            ia = ir = 0
                            for q in range(k):
                                d = a if q == p else digs[q]
                                ia = ia * n + d
                                d = r if q == p else digs[q]
                                ir = ir * n + d
                            changed |= _union(parent, tables[off + ia], tables[off + ir])
        if not changed:
            break
    return np.asarray([_find(parent, i) for i in range(n)], dtype=np.int32)


def _void_view(rows):
    rows = np.ascontiguousarray(rows, dtype=np.int32)
    return rows.reshape(rows.shape[0], -1).view([("", np.void, rows.shape[1] * 4)]).ravel()


class _RowIndex:
    """First-come row interning used by the closure loop."""

    def __init__(self, n_coords):
        self.n_coords = n_coords
        self.by_key = {}

    def lookup(self, row_bytes):
        return self.by_key.get(row_bytes, -1)

    def add(self, row_bytes, idx):
        self.by_key[row_bytes] = idx


def _op_rows(rows, args, t, coord_factor, factor_sizes, fact_offsets, tables):
    """Apply operation t coordinatewise to the arg index tuples (one column per arg)."""
    m = args[0].shape[0] if args else 1
    n_coords = rows.shape[1]
    out = np.empty((m, n_coords), dtype=np.int32)
    for c in range(n_coords):
        f = int(coord_factor[c])
        s = int(factor_sizes[f])
        base = int(fact_offsets[f, t])
        if not args:
            out[:, c] = tables[base]
        else:
            idx = rows[args[0], c].astype(np.int64)
            for a in args[1:]:
                idx = idx * s + rows[a, c]
            out[:, c] = tables[base + idx]
    return out


def close_product(coord_factor, factor_sizes, arities, fact_offsets, tables, seeds,
                  max_rows, build_tables, max_table_cells):
    """BFS closure of the seed rows under all operations, applied coordinatewise.

    Elements are numbered in discovery order: seeds, then constants, then one
    layer per term depth with operations in signature order and argument
    tuples in lexicographic order.  Returns
    (rows, parent_op, parent_args, seed_idx, out_tables, out_offsets, status).
    """
    n_coords = int(coord_factor.shape[0])
    n_ops = len(arities)
    max_arity = max((int(a) for a in arities), default=0)
    pw = max(1, max_arity)

    rows = np.empty((max(16, len(seeds)), n_coords), dtype=np.int32)
    parent_op = np.empty(rows.shape[0], dtype=np.int32)
    parent_args = np.empty((rows.shape[0], pw), dtype=np.int32)
    index = _RowIndex(n_coords)
    count = 0

    def grow_to(need):
        nonlocal rows, parent_op, parent_args
        if need <= rows.shape[0]:
            return
        cap = rows.shape[0]
        while cap < need:
            cap *= 2
        rows = np.resize(rows, (cap, n_coords))
        parent_op = np.resize(parent_op, cap)
        parent_args = np.resize(parent_args, (cap, pw))

    def insert_one(row, op, args):
        nonlocal count
        key = row.tobytes()
        idx = index.lookup(key)
        if idx >= 0:
            return idx, False
        if count >= max_rows:
            return -1, False
        grow_to(count + 1)
        rows[count] = row
        parent_op[count] = op
        for j in range(pw):
            parent_args[count, j] = args[j] if j < len(args) else -1
        index.add(key, count)
        count += 1
        return count - 1, True

    seed_idx = np.empty(len(seeds), dtype=np.int32)
    for i, s in enumerate(seeds):
        idx, _ = insert_one(np.ascontiguousarray(s, dtype=np.int32), -1, (i,))
        if idx < 0:
            return _budget_result(rows, parent_op, parent_args, seed_idx, count, pw)
        seed_idx[i] = idx
    for t in range(n_ops):
        if arities[t] == 0:
            row = _op_rows(rows[:count], (), t, coord_factor, factor_sizes, fact_offsets, tables)[0]
            idx, _ = insert_one(row, t, ())
            if idx < 0:
                return _budget_result(rows, parent_op, parent_args, seed_idx, count, pw)

    fresh_lo = 0
    known = count
    while fresh_lo < known:
        for t in range(n_ops):
            k = int(arities[t])
            if k == 0:
                continue
            if k == 1:
                a_idx = np.arange(fresh_lo, known, dtype=np.int64)
                arg_cols = (a_idx,)
            elif k == 2:
                a1 = np.repeat(np.arange(0, fresh_lo, dtype=np.int64), known - fresh_lo)
                b1 = np.tile(np.arange(fresh_lo, known, dtype=np.int64), fresh_lo)
                a2 = np.repeat(np.arange(fresh_lo, known, dtype=np.int64), known)
                b2 = np.tile(np.arange(0, known, dtype=np.int64), known - fresh_lo)
                arg_cols = (np.concatenate([a1, a2]), np.concatenate([b1, b2]))
            else:
                cols = [[] for _ in range(k)]
                for code in range(known ** k):
                    cc = code
                    digs = [0] * k
                    for q in range(k - 1, -1, -1):
                        digs[q] = cc % known
                        cc //= known
                    if max(digs) < fresh_lo:
                        continue
                    for q in range(k):
                        cols[q].append(digs[q])
                arg_cols = tuple(np.asarray(c, dtype=np.int64) for c in cols)
            if arg_cols[0].shape[0] == 0:
                continue
            cand = _op_rows(rows[:known], arg_cols, t, coord_factor, factor_sizes, fact_offsets, tables)
            _, first = np.unique(_void_view(cand), return_index=True)
            for i in np.sort(first):
                idx, _ = insert_one(cand[i], t, tuple(int(col[i]) for col in arg_cols))
                if idx < 0:
                    return _budget_result(rows, parent_op, parent_args, seed_idx, count, pw)
        fresh_lo = known
        known = count

    out_tables = np.empty(0, dtype=np.int32)
    out_offsets = np.zeros(n_ops + 1, dtype=np.int64)
    if build_tables:
        total = 0
        for t in range(n_ops):
            total += count ** int(arities[t])
        if total > max_table_cells:
            return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
                    seed_idx, out_tables, out_offsets, STATUS_TABLE_BUDGET)
        out_tables = np.empty(total, dtype=np.int32)
        sorted_keys = np.sort(_void_view(rows[:count]))
        order = np.argsort(_void_view(rows[:count]), kind="stable")
        pos = 0
        for t in range(n_ops):
            k = int(arities[t])
            out_offsets[t] = pos
            if k == 0:
                row = _op_rows(rows[:count], (), t, coord_factor, factor_sizes, fact_offsets, tables)
                loc = np.searchsorted(sorted_keys, _void_view(row))
                out_tables[pos] = order[loc[0]]
                pos += 1
                continue
            n_cells = count ** k
            for a in range(count):
                block = n_cells // count
                codes = np.arange(a * block, (a + 1) * block, dtype=np.int64)
                args = []
                cc = codes
                divisor = 1
                for q in range(k - 1, -1, -1):
                    args.append((codes // divisor) % count)
                    divisor *= count
                args = tuple(reversed(args))
                res = _op_rows(rows[:count], args, t, coord_factor, factor_sizes, fact_offsets, tables)
                loc = np.searchsorted(sorted_keys, _void_view(res))
                out_tables[pos + a * block: pos + (a + 1) * block] = order[loc]
            pos += n_cells
        out_offsets[n_ops] = pos
    return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
            seed_idx, out_tables, out_offsets, STATUS_OK)


def _budget_result(rows, parent_op, parent_args, seed_idx, count, pw):
    return (rows[:count].copy(), parent_op[:count].copy(), parent_args[:count].copy(),
            seed_idx, np.empty(0, dtype=np.int32), np.zeros(1, dtype=np.int64), STATUS_ROW_BUDGET)
