"""Compiled inner loops shared by the sssp, spanner and emulator modules.

Conventions: adjacency arrays are CSR (``ptr``, ``nbr``, ``wt``, ``eid``);
an empty ``alive``/``restrict`` array means "no mask".  Distances are int64
with ``INF`` as the saturating sentinel.  The heap orders entries by
``(distance, vertex)`` so ties always settle the smaller vertex id first.
"""

import numpy as np
from numba import config, njit, prange

# skip the TBB probe (the bundled TBB is too old and only produces a warning)
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

INF = np.iinfo(np.int64).max


@njit(cache=True)
def sat_add(a, b):
    if a == INF or b == INF:
        return INF
    return a + b


@njit(cache=True)
def sat_mul(k, a):
    if a == INF:
        return INF
    return k * a


@njit(cache=True)
def heap_push(hd, hv, size, d, v):
    i = size
    while i > 0:
        p = (i - 1) >> 1
        if hd[p] < d or (hd[p] == d and hv[p] < v):
            break
        hd[i] = hd[p]
        hv[i] = hv[p]
        i = p
    hd[i] = d
    hv[i] = v
    return size + 1


@njit(cache=True)
def heap_pop(hd, hv, size):
    """Remove the root; the caller reads ``hd[0], hv[0]`` beforehand."""
    size -= 1
    if size == 0:
        return 0
    d = hd[size]
    v = hv[size]
    i = 0
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        r = c + 1
        if r < size and (hd[r] < hd[c] or (hd[r] == hd[c] and hv[r] < hv[c])):
            c = r
        if d < hd[c] or (d == hd[c] and v < hv[c]):
            break
        hd[i] = hd[c]
        hv[i] = hv[c]
        i = c
    hd[i] = d
    hv[i] = v
    return size


@njit(cache=True)
def dijkstra_into(ptr, nbr, wt, eid, alive, restrict, source, dist, pred):
    """Binary-heap Dijkstra writing into preallocated ``dist`` (INF) and ``pred`` (-1).

    ``pred[x]`` receives the id of the edge through which ``x`` was last improved.
    """
    cap = nbr.shape[0] + 1
    hd = np.empty(cap, np.int64)
    hv = np.empty(cap, np.int64)
    use_alive = alive.shape[0] > 0
    use_restrict = restrict.shape[0] > 0
    dist[source] = 0
    size = heap_push(hd, hv, 0, 0, source)
    while size > 0:
        d = hd[0]
        u = hv[0]
        size = heap_pop(hd, hv, size)
        if d > dist[u]:
            continue
        for k in range(ptr[u], ptr[u + 1]):
            if use_alive and not alive[eid[k]]:
                continue
            x = nbr[k]
            if use_restrict and not restrict[x]:
                continue
            nd = d + wt[k]
            if nd < dist[x]:
                dist[x] = nd
                pred[x] = eid[k]
                size = heap_push(hd, hv, size, nd, x)


@njit(parallel=True, cache=True)
def multi_dijkstra(ptr, nbr, wt, eid, alive, sources, with_pred):
    """One Dijkstra per source; rows of the result follow ``sources``."""
    k = sources.shape[0]
    n = ptr.shape[0] - 1
    dist = np.full((k, n), INF, np.int64)
    pk = k if with_pred else 0
    pred = np.full((pk, n), -1, np.int64)
    no_restrict = np.empty(0, np.bool_)
    for i in prange(k):
        if with_pred:
            dijkstra_into(ptr, nbr, wt, eid, alive, no_restrict, sources[i], dist[i], pred[i])
        else:
            scratch = np.full(n, -1, np.int64)
            dijkstra_into(ptr, nbr, wt, eid, alive, no_restrict, sources[i], dist[i], scratch)
    return dist, pred


@njit(cache=True)
def eliminate_scan(out_ptr, out_nbr, out_wt, out_eid, alive_cur, alive_next,
                   s_row, d_to, d_from):
    """Sparsification sweep shared by the spanner and the emulator.

    For every live edge ``(x, s)`` with ``s`` sampled (``s_row[s] >= 0``) and
    every live edge ``(x, y)``, the edge ``(x, y)`` is cleared in ``alive_next``
    when ``2 d(x,s) + d(s,y) <= 2 wt(x,y) + d(y,s)``.  ``d_to[j, x]`` is
    ``d(x, s_j)`` and ``d_from[j, y]`` is ``d(s_j, y)``.  Returns the number of
    edges cleared by this call.
    """
    n = out_ptr.shape[0] - 1
    removed = 0
    for x in range(n):
        lo = out_ptr[x]
        hi = out_ptr[x + 1]
        for a in range(lo, hi):
            if not alive_cur[out_eid[a]]:
                continue
            j = s_row[out_nbr[a]]
            if j < 0:
                continue
            dxs2 = sat_mul(2, d_to[j, x])
            for b in range(lo, hi):
                e = out_eid[b]
                if not alive_cur[e] or not alive_next[e]:
                    continue
                y = out_nbr[b]
                lhs = sat_add(dxs2, d_from[j, y])
                rhs = sat_add(2 * out_wt[b], d_to[j, y])
                if lhs <= rhs:
                    alive_next[e] = False
                    removed += 1
    return removed
