"""The three search phases and the two eliminator constructions, on one strongly
connected (optionally regularized) graph.

All state lives on a :class:`GirthRun`; each phase function fills in its part
and later phases read it.  Random draws happen only here, in this order:
first-stage stream, out-eliminator picks, in-eliminator picks, second-stage
stream, second-stage eliminator picks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..graph import INF, WeightedDigraph
from ..sssp import DIJKSTRA_COUNTER, IN, OUT, BallSet, multi_source
from . import kernels as K
from .config import GirthConfig


class GirthInvariantError(RuntimeError):
    """A distance that the construction guarantees to be stored was missing."""


class CapExceeded(Exception):
    def __init__(self, phase: str, size_cap: int):
        super().__init__(f"{phase}: a ball exceeded the size cap {size_cap}")
        self.phase = phase
        self.size_cap = size_cap


def _sample_stream(rng: np.random.Generator, n: int, c: float, exponent: float):
    """Uniform draws with replacement; the whole vertex set (shuffled) once the size reaches n."""
    want = math.ceil(c * n ** exponent)
    if want >= n:
        return rng.permutation(n).astype(np.int64), True
    return rng.integers(0, n, size=want, dtype=np.int64), False


def _distinct(stream: np.ndarray, n: int):
    """Distinct vertices in first-occurrence order, a vertex->index map, and the stream as indices."""
    _, first = np.unique(stream, return_index=True)
    verts = stream[np.sort(first)]
    index = np.full(n, -1, dtype=np.int64)
    index[verts] = np.arange(len(verts))
    return verts, index, index[stream]


@dataclass
class Candidate:
    value: int = INF
    phase: int | None = None
    anchor: int = -1  # s1, s2 or v, depending on the phase
    other: int = -1  # the u that closes the cycle

    def offer(self, value: int, phase: int, anchor: int, other: int) -> None:
        if value < self.value:
            self.value, self.phase, self.anchor, self.other = int(value), phase, int(anchor), int(other)


@dataclass
class GirthRun:
    graph: WeightedDigraph
    origin: np.ndarray
    gadget: np.ndarray
    config: GirthConfig
    rng: np.random.Generator
    best: Candidate = field(default_factory=Candidate)
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        g = self.graph
        self.n = g.n
        self.rounds = self.config.rounds(self.n)
        order = np.argsort(self.origin, kind="stable")
        self.grp_mem = order.astype(np.int64)
        self.grp_ptr = np.zeros(int(self.origin.max()) + 2, dtype=np.int64)
        np.cumsum(np.bincount(self.origin, minlength=len(self.grp_ptr) - 1), out=self.grp_ptr[1:])
        self.gadget_arr = np.ascontiguousarray(self.gadget, dtype=np.bool_)


def phase1(run: GirthRun) -> None:
    """Full in/out Dijkstra from every distinct first-stage sample; roundtrip update."""
    n = run.n
    stream, full = _sample_stream(run.rng, n, run.config.c1, 1 / 3)
    run.s1_stream = stream
    run.s1_full = full
    run.s1_vert, run.s1_row, run.s1_stream_rows = _distinct(stream, n)
    c0 = DIJKSTRA_COUNTER.count
    run.D1out, _ = multi_source(run.graph, run.s1_vert, OUT)
    run.D1in, _ = multi_source(run.graph, run.s1_vert, IN)
    run.stats["phase1_dijkstra"] = DIJKSTRA_COUNTER.count - c0
    run.stats["s1_size"] = int(len(stream))
    run.stats["s1_distinct"] = int(len(run.s1_vert))
    run.stats["s1_full"] = bool(full)

    D, Din = run.D1out, run.D1in
    inf = (D == INF) | (Din == INF)
    rt = np.where(inf, 0, D) + np.where(inf, 0, Din)
    rt[inf] = INF
    same = run.origin[run.s1_vert][:, None] == run.origin[None, :]
    rt[same] = INF
    if rt.size:
        flat = int(np.argmin(rt))
        j, u = divmod(flat, n)
        run.best.offer(rt[j, u], 1, run.s1_vert[j], u)


def compute_eliminators_1(run: GirthRun, direction: str) -> None:
    """R1out (direction ``out``) or R1in (``in``): row indices into the first-stage tables."""
    n, k = run.n, run.rounds
    if direction == OUT:
        A, B = run.D1in, run.D1out
    elif direction == IN:
        A, B = run.D1out, run.D1in
    else:
        raise ValueError(direction)
    R = np.full((n, k), -1, dtype=np.int64)
    cnt = np.zeros(n, dtype=np.int64)
    rows = run.s1_stream_rows
    per = -(-len(rows) // k)
    scratch = np.empty(max(1, per), dtype=np.int64)
    for i in range(k):
        batch = np.ascontiguousarray(rows[i * per:(i + 1) * per])
        u01 = run.rng.random(n)
        if len(batch):
            K.elim1_step(batch, run.s1_vert, R, cnt, A, B, u01, scratch)
    if cnt.max(initial=0) > k:
        raise GirthInvariantError("first-stage eliminator table overflow")
    if direction == OUT:
        run.R1out, run.R1out_cnt = R, cnt
    else:
        run.R1in, run.R1in_cnt = R, cnt
    run.stats[f"r1_{direction}_max"] = int(cnt.max(initial=0))


def phase2(run: GirthRun) -> None:
    """Second-stage sample, stored out/in balls for each distinct member, and the update."""
    n = run.n
    g = run.graph
    stream, full = _sample_stream(run.rng, n, run.config.c2, 2 / 3)
    run.s2_stream = stream
    run.s2_full = full
    run.s2_vert, run.s2_ball, run.s2_stream_balls = _distinct(stream, n)
    cap = run.config.cap_ball2(n)
    run.stats["s2_size"] = int(len(stream))
    run.stats["s2_distinct"] = int(len(run.s2_vert))
    run.stats["cap_ball2"] = cap
    c0 = DIJKSTRA_COUNTER.count
    run.bo_ptr, run.bo_vert, run.bo_dist, run.bo_is4, st = K.all_balls(
        g.out_ptr, g.out_nbr, g.out_wt, run.s2_vert, run.R1out, run.R1out_cnt,
        run.D1in, run.D1out, run.s1_vert, cap)
    if st == K.CAP_EXCEEDED:
        raise CapExceeded("phase2", cap)
    run.bi_ptr, run.bi_vert, run.bi_dist, _, st = K.all_balls(
        g.in_ptr, g.in_nbr, g.in_wt, run.s2_vert, run.R1in, run.R1in_cnt,
        run.D1out, run.D1in, run.s1_vert, cap)
    if st == K.CAP_EXCEEDED:
        raise CapExceeded("phase2", cap)
    DIJKSTRA_COUNTER.add(2 * len(run.s2_vert))
    run.stats["phase2_dijkstra"] = DIJKSTRA_COUNTER.count - c0
    run.stats["ball2_out_sizes"] = np.diff(run.bo_ptr)
    run.stats["ball2_in_sizes"] = np.diff(run.bi_ptr)
    owner = np.repeat(np.arange(len(run.s2_vert)), np.diff(run.bo_ptr))
    run.stats["ball4_out_sizes"] = np.bincount(owner[run.bo_is4], minlength=len(run.s2_vert))
    val, b, u = K.phase2_update(run.s2_vert, run.origin, run.bo_ptr, run.bo_vert, run.bo_dist,
                                run.bi_ptr, run.bi_vert, run.bi_dist)
    if b >= 0:
        run.best.offer(val, 2, run.s2_vert[b], u)


def compute_eliminators_2(run: GirthRun) -> None:
    """R2(v): stored-ball indices; every entry's 4-ball contains v."""
    n, k = run.n, run.rounds
    R = np.full((n, k), -1, dtype=np.int64)
    cnt = np.zeros(n, dtype=np.int64)
    balls = run.s2_stream_balls
    per = -(-len(balls) // k)
    for i in range(k):
        batch = np.ascontiguousarray(balls[i * per:(i + 1) * per])
        u01 = run.rng.random(n)
        if not len(batch):
            continue
        _, st = K.elim2_step(batch, n, run.s2_vert, run.bo_ptr, run.bo_vert, run.bo_dist,
                             run.bo_is4, run.bi_ptr, run.bi_vert, run.bi_dist, R, cnt,
                             run.R1in, run.R1in_cnt, run.D1out, run.D1in, u01)
        if st == K.INVARIANT:
            raise GirthInvariantError("second-stage eliminator lacks a stored distance to its owner")
    if cnt.max(initial=0) > k:
        raise GirthInvariantError("second-stage eliminator table overflow")
    run.R2, run.R2cnt = R, cnt
    run.stats["r2_in_max"] = int(cnt.max(initial=0))


def _phase3_args(run: GirthRun):
    g = run.graph
    return (g.in_ptr, g.in_nbr, g.in_wt, g.in_eid, g.out_ptr, g.out_nbr, g.out_wt, g.out_eid,
            run.gadget_arr, run.origin, run.grp_ptr, run.grp_mem,
            run.R1out, run.R1out_cnt, run.D1out, run.D1in, run.R1in, run.R1in_cnt,
            run.R2, run.R2cnt, run.s2_vert, run.bo_ptr, run.bo_vert, run.bo_dist,
            run.bi_ptr, run.bi_vert, run.bi_dist)


def phase3(run: GirthRun) -> None:
    """Modified in-Dijkstra from every vertex; update over the closing out-edges."""
    cap = run.config.cap_ball3(run.n)
    run.stats["cap_ball3"] = cap
    c0 = DIJKSTRA_COUNTER.count
    best_val, best_u, sizes, st, where = K.phase3_all(*_phase3_args(run), cap)
    if st == K.CAP_EXCEEDED:
        raise CapExceeded("phase3", cap)
    if st == K.INVARIANT:
        raise GirthInvariantError(f"stored distance d(r2, {where}) missing in phase 3")
    DIJKSTRA_COUNTER.add(run.n)
    run.stats["phase3_dijkstra"] = DIJKSTRA_COUNTER.count - c0
    run.stats["ball3_sizes"] = sizes
    v = int(np.argmin(best_val))
    if best_val[v] < INF:
        run.best.offer(best_val[v], 3, v, best_u[v])


def phase3_single(run: GirthRun, v: int):
    """One modified in-Dijkstra from ``v`` kept for inspection.

    Returns ``(members, dist, pred, best value, best u)``; ``dist``/``pred`` are
    full-length arrays (pred holds edge ids toward the source side).
    """
    n, m = run.n, run.graph.m
    dist = np.full(n, INF, np.int64)
    pred = np.full(n, -1, np.int64)
    acc = np.zeros(n, np.bool_)
    touched = np.empty(n, np.int64)
    hd = np.empty(m + n + 1, np.int64)
    hv = np.empty(m + n + 1, np.int64)
    members = np.empty(n, np.int64)
    drv = np.empty(max(1, run.R2.shape[1]), np.int64)
    val, u, cnt, st = K.phase3_search(int(v), *_phase3_args(run), -1, dist, pred, acc,
                                      touched, hd, hv, members, drv, False)
    if st == K.INVARIANT:
        raise GirthInvariantError(f"stored distance d(r2, {v}) missing in phase 3")
    DIJKSTRA_COUNTER.add(1)
    return members[:cnt].copy(), dist, pred, int(val), int(u)


# -- single-query helpers (used by the verification harness) ------------------------

def ball2(run: GirthRun, v: int, direction: str) -> BallSet:
    """B2out(v) or B2in(v) for any vertex, recomputed from the first-stage tables."""
    g = run.graph
    if direction == OUT:
        ptr, nbr, wt = g.out_ptr, g.out_nbr, g.out_wt
        R, cnt, A, B = run.R1out, run.R1out_cnt, run.D1in, run.D1out
    else:
        ptr, nbr, wt = g.in_ptr, g.in_nbr, g.in_wt
        R, cnt, A, B = run.R1in, run.R1in_cnt, run.D1out, run.D1in
    bptr, bv, bd, b4, _ = K.all_balls(ptr, nbr, wt, np.array([v], np.int64), R, cnt, A, B,
                                      run.s1_vert, -1)
    DIJKSTRA_COUNTER.add(1)
    variant = "B2out" if direction == OUT else "B2in"
    ball = BallSet(owner=int(v), variant=variant, dist=dict(zip(bv.tolist(), bd.tolist())))
    ball.four = {int(x) for x, f in zip(bv.tolist(), b4.tolist()) if f}
    return ball


def ball4(run: GirthRun, v: int) -> BallSet:
    b2 = ball2(run, v, OUT)
    return BallSet(owner=int(v), variant="B4out", dist={x: b2.dist[x] for x in b2.four})


def stored_ball(run: GirthRun, r2: int, variant: str) -> BallSet:
    """A stored second-stage ball (``r2`` must be a second-stage sample)."""
    b = int(run.s2_ball[r2])
    if b < 0:
        raise KeyError(f"{r2} is not a second-stage sample")
    if variant == "B2in":
        lo, hi = run.bi_ptr[b], run.bi_ptr[b + 1]
        verts, dists = run.bi_vert[lo:hi], run.bi_dist[lo:hi]
    else:
        lo, hi = run.bo_ptr[b], run.bo_ptr[b + 1]
        verts, dists = run.bo_vert[lo:hi], run.bo_dist[lo:hi]
        if variant == "B4out":
            keep = run.bo_is4[lo:hi]
            verts, dists = verts[keep], dists[keep]
        elif variant != "B2out":
            raise ValueError(variant)
    return BallSet(owner=int(r2), variant=variant, dist=dict(zip(verts.tolist(), dists.tolist())))


def underestimate_doubled(run: GirthRun, u: int, r2: int) -> int:
    """Twice the distance underestimate of d(u, r2); ``r2`` must be a second-stage sample."""
    b = int(run.s2_ball[r2])
    if b < 0:
        raise KeyError(f"{r2} is not a second-stage sample")
    return int(K.under2(int(u), b, int(r2), run.bi_ptr, run.bi_vert, run.bi_dist,
                        run.R1in, run.R1in_cnt, run.D1out, run.D1in))


def eliminators(run: GirthRun, v: int) -> dict:
    """Eliminator sets of ``v`` as vertex lists."""
    return {
        "r1_out": run.s1_vert[run.R1out[v, :run.R1out_cnt[v]]].tolist(),
        "r1_in": run.s1_vert[run.R1in[v, :run.R1in_cnt[v]]].tolist(),
        "r2_in": run.s2_vert[run.R2[v, :run.R2cnt[v]]].tolist() if hasattr(run, "R2") else [],
    }
