"""Hot inner loops.

Every kernel is written once as plain Python over numpy arrays. When numba is
importable and ``FAIRMATCH_DISABLE_NUMBA`` is unset (or ``0``), the kernels are
compiled with ``@njit``; otherwise the interpreted versions run unchanged.
The uncompiled function is always reachable as ``kernel.py_func``.
"""

import os

import numpy as np

_DISABLE = os.environ.get("FAIRMATCH_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _kernel(fn):
    if HAS_NUMBA:
        return njit(cache=True, nogil=True)(fn)
    fn.py_func = fn
    return fn


@_kernel
def greedy_scan(row_ptr, row_idx, caps, order):
    """Scan ``order`` and keep every vertex that fits all of its rows.

    ``row_ptr``/``row_idx`` is the vertex -> constraint-row incidence in CSR
    form. Returns ``(selected, blocker)``; ``blocker[v]`` is the first full row
    that rejected ``v`` (-1 for selected or never-scanned vertices).
    """
    n = row_ptr.shape[0] - 1
    load = np.zeros(caps.shape[0], dtype=np.int64)
    selected = np.zeros(n, dtype=np.bool_)
    blocker = np.full(n, -1, dtype=np.int64)
    for k in range(order.shape[0]):
        v = order[k]
        ok = True
        for j in range(row_ptr[v], row_ptr[v + 1]):
            r = row_idx[j]
            if load[r] >= caps[r]:
                blocker[v] = r
                ok = False
                break
        if ok:
            selected[v] = True
            for j in range(row_ptr[v], row_ptr[v + 1]):
                load[row_idx[j]] += 1
    return selected, blocker


@_kernel
def row_loads(row_ptr, row_idx, n_rows, chosen):
    """Count how many chosen vertices sit in each row."""
    load = np.zeros(n_rows, dtype=np.int64)
    for k in range(chosen.shape[0]):
        v = chosen[k]
        for j in range(row_ptr[v], row_ptr[v + 1]):
            load[row_idx[j]] += 1
    return load


@_kernel
def max_flow(n_nodes, tails, heads, caps, source, sink):
    """Dinic's algorithm on an arc list; returns ``(value, flow_per_arc)``.

    Capacities must be nonnegative integers. Flow is integral.
    """
    m = tails.shape[0]
    # residual arcs: 2k forward, 2k+1 backward
    to = np.empty(2 * m, dtype=np.int64)
    res = np.empty(2 * m, dtype=np.int64)
    frm = np.empty(2 * m, dtype=np.int64)
    for k in range(m):
        to[2 * k] = heads[k]
        frm[2 * k] = tails[k]
        res[2 * k] = caps[k]
        to[2 * k + 1] = tails[k]
        frm[2 * k + 1] = heads[k]
        res[2 * k + 1] = 0
    deg = np.zeros(n_nodes + 1, dtype=np.int64)
    for a in range(2 * m):
        deg[frm[a] + 1] += 1
    start = np.cumsum(deg)
    adj = np.empty(2 * m, dtype=np.int64)
    fill = start[:-1].copy()
    for a in range(2 * m):
        u = frm[a]
        adj[fill[u]] = a
        fill[u] += 1

    level = np.empty(n_nodes, dtype=np.int64)
    queue = np.empty(n_nodes, dtype=np.int64)
    it = np.empty(n_nodes, dtype=np.int64)
    path = np.empty(n_nodes, dtype=np.int64)
    total = 0
    if source == sink:
        return total, np.zeros(m, dtype=np.int64)
    while True:
        level[:] = -1
        level[source] = 0
        qh = 0
        qt = 0
        queue[qt] = source
        qt += 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            for j in range(start[u], start[u + 1]):
                a = adj[j]
                if res[a] > 0 and level[to[a]] < 0:
                    level[to[a]] = level[u] + 1
                    queue[qt] = to[a]
                    qt += 1
        if level[sink] < 0:
            break
        for u in range(n_nodes):
            it[u] = start[u]
        while True:
            depth = 0
            u = source
            while u != sink:
                advanced = False
                while it[u] < start[u + 1]:
                    a = adj[it[u]]
                    v = to[a]
                    if res[a] > 0 and level[v] == level[u] + 1:
                        path[depth] = a
                        depth += 1
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    if u == source:
                        break
                    level[u] = -1
                    depth -= 1
                    u = frm[path[depth]]
                    it[u] += 1
            if u != sink:
                break
            push = res[path[0]]
            for d in range(1, depth):
                if res[path[d]] < push:
                    push = res[path[d]]
            for d in range(depth):
                res[path[d]] -= push
                res[path[d] ^ 1] += push
            total += push
    flow = np.empty(m, dtype=np.int64)
    for k in range(m):
        flow[k] = caps[k] - res[2 * k]
    return total, flow


def csr(lists, n_cols=None):
    """Pack a list of integer lists into ``(ptr, idx)`` int64 arrays."""
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, row in enumerate(lists):
        ptr[i + 1] = ptr[i] + len(row)
    idx = np.fromiter((x for row in lists for x in row), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx
