"""Compiled searches and table updates for the approximate girth pipeline.

Table conventions used throughout:

* ``A[j, x] = d(x, s_j)`` and ``B[j, x] = d(s_j, x)`` for the ``j``-th distinct
  first-stage sample.  Searches on the reversed graph simply swap the two.
* Eliminator tables are ``(n, cap)`` int arrays plus a count per vertex.
* Stored balls are CSR blocks with vertices sorted ascending, so membership
  is a binary search.
* Status codes: 0 ok, 1 size cap exceeded, 2 missing stored distance.
"""

import numpy as np
from numba import njit

from .._kernels import INF, heap_pop, heap_push, sat_add, sat_mul

OK = 0
CAP_EXCEEDED = 1
INVARIANT = 2


@njit(cache=True)
def find(arr, lo, hi, x):
    """Index of ``x`` in sorted ``arr[lo:hi]`` or -1."""
    end = hi
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo < end and arr[lo] == x:
        return lo
    return -1


@njit(cache=True)
def ball_lookup(ptr, vert, dist, b, x):
    k = find(vert, ptr[b], ptr[b + 1], x)
    if k < 0:
        return INF
    return dist[k]


@njit(cache=True)
def elim1_step(batch, s_vert, R, Rcnt, A, B, u01, scratch):
    """One round of eliminator growth against the sample rows in ``batch``.

    ``s`` joins T(v) when ``2A[s,v] + B[s,t] < 2A[t,v] + B[t,s]`` for every
    ``t`` already in R(v); one uniform pick from T(v) is appended.
    Returns how many vertices gained an eliminator.
    """
    n = R.shape[0]
    grown = 0
    for v in range(n):
        cnt = 0
        for a in range(batch.shape[0]):
            s = batch[a]
            ok = True
            for q in range(Rcnt[v]):
                t = R[v, q]
                lhs = sat_add(sat_mul(2, A[s, v]), B[s, s_vert[t]])
                rhs = sat_add(sat_mul(2, A[t, v]), B[t, s_vert[s]])
                if not lhs < rhs:
                    ok = False
                    break
            if ok:
                scratch[cnt] = s
                cnt += 1
        if cnt > 0:
            pick = int(u01[v] * cnt)
            if pick >= cnt:
                pick = cnt - 1
            R[v, Rcnt[v]] = scratch[pick]
            Rcnt[v] += 1
            grown += 1
    return grown


@njit(cache=True)
def ball_search(ptr, nbr, wt, source, R, Rcnt, A, B, s_vert, cap,
                dist, touched, hd, hv, mem_v, mem_d, mem_4):
    """Pruned Dijkstra: a settled ``u`` relaxes only if it passes the 2-condition.

    The 2-condition for eliminator row ``r`` is
    ``2A[r,src] + B[r,u] > 2D[u] + A[r,u]``; members are additionally
    tagged when ``4A[r,src] + B[r,u] > 4D[u] + 3A[r,u]`` holds for every row.
    ``dist`` must be all INF on entry and is restored before returning.
    Returns ``(member count, status)``.
    """
    ntouch = 0
    count = 0
    status = OK
    dist[source] = 0
    touched[ntouch] = source
    ntouch += 1
    size = heap_push(hd, hv, 0, 0, source)
    while size > 0:
        d = hd[0]
        u = hv[0]
        size = heap_pop(hd, hv, size)
        if d > dist[u]:
            continue
        is4 = True
        ok = True
        for q in range(Rcnt[source]):
            r = R[source, q]
            avr = A[r, source]
            bru = B[r, u]
            aru = A[r, u]
            if not sat_add(sat_mul(2, avr), bru) > sat_add(sat_mul(2, d), aru):
                ok = False
                break
            if is4 and not sat_add(sat_mul(4, avr), bru) > sat_add(sat_mul(4, d), sat_mul(3, aru)):
                is4 = False
        if not ok:
            continue
        mem_v[count] = u
        mem_d[count] = d
        mem_4[count] = is4
        count += 1
        if cap >= 0 and count > cap:
            status = CAP_EXCEEDED
            break
        for k in range(ptr[u], ptr[u + 1]):
            x = nbr[k]
            nd = d + wt[k]
            if nd < dist[x]:
                if dist[x] == INF:
                    touched[ntouch] = x
                    ntouch += 1
                dist[x] = nd
                size = heap_push(hd, hv, size, nd, x)
    for i in range(ntouch):
        dist[touched[i]] = INF
    return count, status


@njit(cache=True)
def all_balls(ptr, nbr, wt, sources, R, Rcnt, A, B, s_vert, cap):
    """Balls for every source, packed as CSR sorted by vertex."""
    n = ptr.shape[0] - 1
    m = nbr.shape[0]
    dist = np.full(n, INF, np.int64)
    touched = np.empty(n, np.int64)
    hd = np.empty(m + 1, np.int64)
    hv = np.empty(m + 1, np.int64)
    mem_v = np.empty(n + 1, np.int64)
    mem_d = np.empty(n + 1, np.int64)
    mem_4 = np.empty(n + 1, np.bool_)
    k = sources.shape[0]
    bptr = np.zeros(k + 1, np.int64)
    capacity = max(16, 4 * k)
    out_v = np.empty(capacity, np.int64)
    out_d = np.empty(capacity, np.int64)
    out_4 = np.empty(capacity, np.bool_)
    total = 0
    for b in range(k):
        cnt, status = ball_search(ptr, nbr, wt, sources[b], R, Rcnt, A, B, s_vert, cap,
                                  dist, touched, hd, hv, mem_v, mem_d, mem_4)
        if status != OK:
            return bptr, out_v[:0], out_d[:0], out_4[:0], status
        if total + cnt > capacity:
            while total + cnt > capacity:
                capacity *= 2
            nv = np.empty(capacity, np.int64)
            nd = np.empty(capacity, np.int64)
            n4 = np.empty(capacity, np.bool_)
            nv[:total] = out_v[:total]
            nd[:total] = out_d[:total]
            n4[:total] = out_4[:total]
            out_v, out_d, out_4 = nv, nd, n4
        order = np.argsort(mem_v[:cnt])
        for i in range(cnt):
            out_v[total + i] = mem_v[order[i]]
            out_d[total + i] = mem_d[order[i]]
            out_4[total + i] = mem_4[order[i]]
        total += cnt
        bptr[b + 1] = total
    return bptr, out_v[:total].copy(), out_d[:total].copy(), out_4[:total].copy(), OK


@njit(cache=True)
def under2(u, b, r2, bi_ptr, bi_vert, bi_dist, R1in, R1in_cnt, D1out, D1in):
    """Twice the underestimate of d(u, r2), where ``b`` is r2's stored-ball index."""
    k = find(bi_vert, bi_ptr[b], bi_ptr[b + 1], u)
    if k >= 0:
        return sat_mul(2, bi_dist[k])
    best = INF
    for q in range(R1in_cnt[r2]):
        r1 = R1in[r2, q]
        a = D1out[r1, r2]
        c = D1in[r1, u]
        e = D1out[r1, u]
        if a == INF or c == INF or e == INF:
            continue
        val = 2 * a + c - e
        if val < best:
            best = val
    return best


@njit(cache=True)
def phase2_update(s2_vert, origin, bo_ptr, bo_vert, bo_dist, bi_ptr, bi_vert, bi_dist):
    """Best ``d(s,u) + d(u,s)`` over u in both balls of s with a different origin.

    Returns ``(value, ball index, u)``; ties prefer the earlier ball, then smaller u.
    """
    best = INF
    best_b = -1
    best_u = -1
    for b in range(s2_vert.shape[0]):
        s = s2_vert[b]
        i = bo_ptr[b]
        j = bi_ptr[b]
        while i < bo_ptr[b + 1] and j < bi_ptr[b + 1]:
            x = bo_vert[i]
            y = bi_vert[j]
            if x < y:
                i += 1
            elif y < x:
                j += 1
            else:
                if origin[x] != origin[s]:
                    c = sat_add(bo_dist[i], bi_dist[j])
                    if c < best:
                        best = c
                        best_b = b
                        best_u = x
                i += 1
                j += 1
    return best, best_b, best_u


@njit(cache=True)
def elim2_step(batch, n, s2_vert, bo_ptr, bo_vert, bo_dist, bo_is4,
               bi_ptr, bi_vert, bi_dist, R2, R2cnt, R1in, R1in_cnt, D1out, D1in, u01):
    """One round of second-stage eliminator growth.

    ``batch`` holds stored-ball indices.  T(v) collects batch entries s whose
    4-ball contains v and that survive every t already in R(v):
    s must lie in t's out-ball and ``4d(s,v) + 2d(t,s) < 4d(t,v) + 2*under(s,t)``.
    Returns ``(grown, status)``.
    """
    # bucket batch entries by the members of their 4-balls, keeping batch order
    bcount = np.zeros(n + 1, np.int64)
    for a in range(batch.shape[0]):
        b = batch[a]
        for i in range(bo_ptr[b], bo_ptr[b + 1]):
            if bo_is4[i]:
                bcount[bo_vert[i] + 1] += 1
    for v in range(n):
        bcount[v + 1] += bcount[v]
    fill = bcount[:n].copy()
    bucket_s = np.empty(bcount[n], np.int64)
    bucket_d = np.empty(bcount[n], np.int64)
    for a in range(batch.shape[0]):
        b = batch[a]
        for i in range(bo_ptr[b], bo_ptr[b + 1]):
            if bo_is4[i]:
                v = bo_vert[i]
                bucket_s[fill[v]] = b
                bucket_d[fill[v]] = bo_dist[i]
                fill[v] += 1
    scratch = np.empty(max(1, batch.shape[0]), np.int64)
    grown = 0
    for v in range(n):
        cnt = 0
        for e in range(bcount[v], bcount[v + 1]):
            b = bucket_s[e]
            s = s2_vert[b]
            dsv = bucket_d[e]
            ok = True
            for q in range(R2cnt[v]):
                t = R2[v, q]
                dtv = ball_lookup(bo_ptr, bo_vert, bo_dist, t, v)
                if dtv == INF:
                    return grown, INVARIANT
                dts = ball_lookup(bo_ptr, bo_vert, bo_dist, t, s)
                if dts == INF:
                    ok = False
                    break
                und = under2(s, t, s2_vert[t], bi_ptr, bi_vert, bi_dist, R1in, R1in_cnt, D1out, D1in)
                if not sat_add(4 * dsv, 2 * dts) < sat_add(4 * dtv, und):
                    ok = False
                    break
            if ok:
                scratch[cnt] = b
                cnt += 1
        if cnt > 0:
            pick = int(u01[v] * cnt)
            if pick >= cnt:
                pick = cnt - 1
            R2[v, R2cnt[v]] = scratch[pick]
            R2cnt[v] += 1
            grown += 1
    return grown, OK


@njit(cache=True)
def phase3_search(v, in_ptr, in_nbr, in_wt, in_eid, out_ptr, out_nbr, out_wt, out_eid,
                  gadget, origin, grp_ptr, grp_mem,
                  R1out, R1out_cnt, D1out, D1in, R1in, R1in_cnt,
                  R2, R2cnt, s2_vert, bo_ptr, bo_vert, bo_dist, bi_ptr, bi_vert, bi_dist,
                  cap, dist, pred, acc, touched, hd, hv, members, drv, reset):
    """Modified in-Dijkstra from ``v`` (and the other copies of v's origin, at 0).

    A popped non-seed ``s`` relaxes its in-neighbours only if
      1. ``4d(s,r1) + d(r1,v) > 4D[s] + 3d(v,r1)`` for r1 in R1out(s),
      2. s lies in the stored out-ball of every r2 in R2(v), and
      3. ``4D[s] + 2d(r2,s) < 4d(r2,v) + 2*under(s,r2)`` for those r2.
    Afterwards the best ``D[u] + wt(v,u)`` over non-gadget out-edges (v,u)
    with u accepted is returned as ``(value, u, member count, status)``.
    With ``reset`` the scratch ``dist``/``pred``/``acc`` are restored to
    INF/-1/False on return; accepted vertices are left in ``members[:count]``.
    """
    nr2 = R2cnt[v]
    for q in range(nr2):
        t = R2[v, q]
        drv[q] = ball_lookup(bo_ptr, bo_vert, bo_dist, t, v)
        if drv[q] == INF:
            return INF, -1, 0, INVARIANT
    ov = origin[v]
    ntouch = 0
    size = 0
    for i in range(grp_ptr[ov], grp_ptr[ov + 1]):
        x = grp_mem[i]
        dist[x] = 0
        touched[ntouch] = x
        ntouch += 1
        size = heap_push(hd, hv, size, 0, x)
    count = 0
    status = OK
    while size > 0:
        d = hd[0]
        s = hv[0]
        size = heap_pop(hd, hv, size)
        if d > dist[s]:
            continue
        if origin[s] != ov:
            ok = True
            for q in range(R1out_cnt[s]):
                r1 = R1out[s, q]
                lhs = sat_add(sat_mul(4, D1in[r1, s]), D1out[r1, v])
                rhs = sat_add(sat_mul(4, d), sat_mul(3, D1in[r1, v]))
                if not lhs > rhs:
                    ok = False
                    break
            if ok:
                for q in range(nr2):
                    t = R2[v, q]
                    drs = ball_lookup(bo_ptr, bo_vert, bo_dist, t, s)
                    if drs == INF:
                        ok = False
                        break
                    und = under2(s, t, s2_vert[t], bi_ptr, bi_vert, bi_dist,
                                 R1in, R1in_cnt, D1out, D1in)
                    if not sat_add(sat_mul(4, d), 2 * drs) < sat_add(4 * drv[q], und):
                        ok = False
                        break
            if not ok:
                continue
        acc[s] = True
        members[count] = s
        count += 1
        if cap >= 0 and count > cap:
            status = CAP_EXCEEDED
            break
        for k in range(in_ptr[s], in_ptr[s + 1]):
            x = in_nbr[k]
            nd = d + in_wt[k]
            if nd < dist[x]:
                if dist[x] == INF:
                    touched[ntouch] = x
                    ntouch += 1
                dist[x] = nd
                pred[x] = in_eid[k]
                size = heap_push(hd, hv, size, nd, x)
    best = INF
    best_u = -1
    if status == OK:
        for k in range(out_ptr[v], out_ptr[v + 1]):
            u = out_nbr[k]
            if gadget[out_eid[k]] or not acc[u]:
                continue
            c = dist[u] + out_wt[k]
            if c < best or (c == best and u < best_u):
                best = c
                best_u = u
    if reset:
        for i in range(ntouch):
            x = touched[i]
            dist[x] = INF
            pred[x] = -1
            acc[x] = False
    return best, best_u, count, status


@njit(cache=True)
def phase3_all(in_ptr, in_nbr, in_wt, in_eid, out_ptr, out_nbr, out_wt, out_eid,
               gadget, origin, grp_ptr, grp_mem,
               R1out, R1out_cnt, D1out, D1in, R1in, R1in_cnt,
               R2, R2cnt, s2_vert, bo_ptr, bo_vert, bo_dist, bi_ptr, bi_vert, bi_dist, cap):
    """Run the modified in-Dijkstra from every vertex; stop at the first bad status."""
    n = in_ptr.shape[0] - 1
    m = in_nbr.shape[0]
    dist = np.full(n, INF, np.int64)
    pred = np.full(n, -1, np.int64)
    acc = np.zeros(n, np.bool_)
    touched = np.empty(n, np.int64)
    hd = np.empty(m + n + 1, np.int64)
    hv = np.empty(m + n + 1, np.int64)
    members = np.empty(n, np.int64)
    drv = np.empty(max(1, R2.shape[1]), np.int64)
    best_val = np.full(n, INF, np.int64)
    best_u = np.full(n, -1, np.int64)
    sizes = np.zeros(n, np.int64)
    for v in range(n):
        val, u, cnt, status = phase3_search(
            v, in_ptr, in_nbr, in_wt, in_eid, out_ptr, out_nbr, out_wt, out_eid,
            gadget, origin, grp_ptr, grp_mem,
            R1out, R1out_cnt, D1out, D1in, R1in, R1in_cnt,
            R2, R2cnt, s2_vert, bo_ptr, bo_vert, bo_dist, bi_ptr, bi_vert, bi_dist,
            cap, dist, pred, acc, touched, hd, hv, members, drv, True)
        if status != OK:
            return best_val, best_u, sizes, status, v
        best_val[v] = val
        best_u[v] = u
        sizes[v] = cnt
    return best_val, best_u, sizes, OK, -1
