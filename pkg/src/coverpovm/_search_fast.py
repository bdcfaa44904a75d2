"""Numba-compiled inner loop for the low-index coset-table search.

Mirrors the pure-Python search in lowindex.py exactly (same table order,
same pruning); importing this module is optional and lowindex falls back to
the Python implementation when numba is unavailable.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_DONE = 0
STATUS_BUDGET = 1
STATUS_BUFFER = 2


@njit(cache=True)
def _kernel(ncols, d_max, rot_data, rot_start, col_ptr, col_ids,
            node_budget, res_buf):
    size = d_max * ncols
    tab = np.full(size, -1, np.int64)
    tau = np.full(d_max, -1, np.int64)
    sigma = np.empty(d_max, np.int64)
    trail = np.empty(size, np.int64)
    ded = np.empty(2 * size + 8, np.int64)
    nframes = size + 2
    f_pos = np.empty(nframes, np.int64)
    f_beta = np.empty(nframes, np.int64)
    f_mark = np.empty(nframes, np.int64)
    f_n = np.empty(nframes, np.int64)

    tlen = 0
    depth = 0
    f_pos[0] = 0
    f_beta[0] = -1
    f_mark[0] = 0
    f_n[0] = 1
    nodes = 0
    nres = 0
    res_len = 0

    while depth >= 0:
        while tlen > f_mark[depth]:
            tlen -= 1
            tab[trail[tlen]] = -1
        pos = f_pos[depth]
        n = f_n[depth]
        alpha = pos // ncols
        c = pos % ncols
        cinv = c ^ 1
        beta = f_beta[depth] + 1
        while beta < n and tab[beta * ncols + cinv] >= 0:
            beta += 1
        if beta > n or (beta == n and n >= d_max):
            depth -= 1
            continue
        f_beta[depth] = beta
        nodes += 1
        if nodes > node_budget:
            return STATUS_BUDGET, nres, res_len, nodes
        n2 = n + 1 if beta == n else n
        pos2 = beta * ncols + cinv
        tab[pos] = beta
        tab[pos2] = alpha
        trail[tlen] = pos
        tlen += 1
        trail[tlen] = pos2
        tlen += 1
        dlen = 0
        ded[dlen] = pos
        dlen += 1
        ded[dlen] = pos2
        dlen += 1
        ok = True
        while dlen > 0 and ok:
            dlen -= 1
            e = ded[dlen]
            gamma = e // ncols
            ce = e % ncols
            for rix in range(col_ptr[ce], col_ptr[ce + 1]):
                rid = col_ids[rix]
                s0 = rot_start[rid]
                s1 = rot_start[rid + 1]
                f = gamma
                i = s0
                b = gamma
                j = s1 - 1
                while True:
                    while i <= j:
                        v = tab[f * ncols + rot_data[i]]
                        if v < 0:
                            break
                        f = v
                        i += 1
                    if i > j:
                        if f != b:
                            ok = False
                        break
                    while j >= i:
                        v = tab[b * ncols + (rot_data[j] ^ 1)]
                        if v < 0:
                            break
                        b = v
                        j -= 1
                    if j == i:
                        c2 = rot_data[i]
                        p1 = f * ncols + c2
                        p2 = b * ncols + (c2 ^ 1)
                        tab[p1] = b
                        tab[p2] = f
                        trail[tlen] = p1
                        tlen += 1
                        trail[tlen] = p2
                        tlen += 1
                        ded[dlen] = p1
                        dlen += 1
                        ded[dlen] = p2
                        dlen += 1
                        break
                    if j < i:
                        if f != b:
                            ok = False
                        break
                    break
                if not ok:
                    break
        if ok:
            # first-in-class: reject if some re-rooting is definitely smaller
            cur00 = tab[0]
            for gamma in range(1, n2):
                v0 = tab[gamma * ncols]
                if v0 < 0 or cur00 < 0:
                    continue
                nv0 = 0 if v0 == gamma else 1
                if nv0 > cur00:
                    continue
                sigma[0] = gamma
                slen = 1
                tau[gamma] = 0
                verdict = 0
                i = 0
                while i < slen and verdict == 0:
                    base_old = sigma[i] * ncols
                    base_cur = i * ncols
                    for cc in range(ncols):
                        v = tab[base_old + cc]
                        cur = tab[base_cur + cc]
                        if v < 0 or cur < 0:
                            verdict = 2
                            break
                        nv = tau[v]
                        if nv < 0:
                            nv = slen
                            tau[v] = nv
                            sigma[slen] = v
                            slen += 1
                        if nv != cur:
                            verdict = -1 if nv < cur else 1
                            break
                    i += 1
                for k in range(slen):
                    tau[sigma[k]] = -1
                if verdict == -1:
                    ok = False
                    break
        if not ok:
            continue
        limit = n2 * ncols
        nxt = pos
        while nxt < limit and tab[nxt] >= 0:
            nxt += 1
        if nxt >= limit:
            need = 1 + limit
            if res_len + need > res_buf.shape[0]:
                return STATUS_BUFFER, nres, res_len, nodes
            res_buf[res_len] = n2
            res_len += 1
            for q in range(limit):
                res_buf[res_len + q] = tab[q]
            res_len += limit
            nres += 1
        else:
            depth += 1
            f_pos[depth] = nxt
            f_beta[depth] = -1
            f_mark[depth] = tlen
            f_n[depth] = n2
    return STATUS_DONE, nres, res_len, nodes


def search_tables_fast(ncols, d_max, rotations, node_budget):
    """Run the compiled search; returns (tables, nodes) or raises on budget.

    rotations: list of column-index tuples (relator rotations, deduplicated).
    Tables come back as (status, list of row-tuples) in discovery order.
    """
    rot_data = []
    rot_start = [0]
    by_col: list[list[int]] = [[] for _ in range(ncols)]
    for rid, rot in enumerate(rotations):
        rot_data.extend(rot)
        rot_start.append(len(rot_data))
        by_col[rot[0]].append(rid)
    col_ptr = [0]
    col_ids = []
    for c in range(ncols):
        col_ids.extend(by_col[c])
        col_ptr.append(len(col_ids))
    rot_data = np.asarray(rot_data or [0], dtype=np.int64)
    rot_start = np.asarray(rot_start, dtype=np.int64)
    col_ptr = np.asarray(col_ptr, dtype=np.int64)
    col_ids = np.asarray(col_ids or [0], dtype=np.int64)

    bufsize = 1 << 18
    while True:
        res_buf = np.empty(bufsize, dtype=np.int64)
        status, nres, res_len, nodes = _kernel(
            ncols, d_max, rot_data, rot_start, col_ptr, col_ids,
            node_budget, res_buf,
        )
        if status == STATUS_BUFFER:
            bufsize *= 4
            continue
        tables = []
        off = 0
        for _ in range(nres):
            n = int(res_buf[off])
            off += 1
            rows = tuple(
                tuple(int(res_buf[off + r * ncols + c]) for c in range(ncols))
                for r in range(n)
            )
            tables.append(rows)
            off += n * ncols
        return status, tables, nodes
