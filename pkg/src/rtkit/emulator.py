"""(2k-1)-roundtrip emulator: pivots and bunches over a sequence of sparsified graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import INF, WeightedDigraph
from .spanner import make_schedule, sample_vertices, sparsify_step
from .sssp import DIJKSTRA_COUNTER, IN, OUT, multi_source


class ParameterError(ValueError):
    pass


@dataclass
class EmulatorResult:
    n: int
    k: int
    src: np.ndarray  # synthetic edges, in insertion order (may repeat pairs)
    dst: np.ndarray
    wt: np.ndarray
    residual: np.ndarray  # edge ids of the input graph left after the last sweep
    stats: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        """Number of distinct directed pairs in H."""
        return int(len(np.unique(self.src * max(self.n, 1) + self.dst)))


def effective_k(n: int, k: int) -> int:
    if k < 3:
        raise ParameterError("k must be ≥ 3")
    lg = int(math.floor(math.log2(n))) if n >= 2 else 0
    return max(3, lg) if k > lg else k


def build_emulator(g: WeightedDigraph, k: int = 3, seed: int = 0, trace: bool = False) -> EmulatorResult:
    """Weighted H with d_G(u<->v) <= d_H(u<->v) <= (2k-1) d_G(u<->v).

    Runs k-1 rounds of ``delta`` iterations; draw order is one ``random(n)``
    vector per iteration.  Synthetic edges carry distances of the current
    sparsified graph; the edges surviving the last sweep are appended.
    With ``trace`` the per-round bunch thresholds go to ``stats["thresholds"]``.
    """
    k_used = effective_k(g.n, k)
    n, m = g.n, g.m
    rng = np.random.default_rng(seed)
    alive = np.ones(m, dtype=bool)
    thresh = np.full(n, INF, dtype=np.int64)
    srcs, dsts, wts = [], [], []
    iters = []
    round_bunch = []
    thresholds = []
    calls0 = DIJKSTRA_COUNTER.count
    sched = make_schedule(n, 1.0 / k_used) if n >= 2 else None
    delta = sched.delta if sched else 0
    cols = np.arange(n)
    for r in range(k_used - 1 if sched else 0):
        bunch_total = np.zeros(n, dtype=np.int64)
        for t in range(delta):
            i = r * delta + t
            sample = sample_vertices(rng, n, sched.sample_prob(i))
            rec = {"i": i, "round": r, "sample_size": int(len(sample)),
                   "edges_before": int(alive.sum())}
            if len(sample) == 0:
                best = np.full(n, INF, dtype=np.int64)
                rec.update(bunch_mean=0.0, synthetic_new=0, removed=0)
            else:
                d_from, _ = multi_source(g, sample, OUT, alive=alive)
                d_to, _ = multi_source(g, sample, IN, alive=alive)
                # rt[j, u] = d(s_j, u) + d(u, s_j); sample is sorted so argmin breaks ties by id
                rt = roundtrip_from_distances_pair(d_from, d_to)
                piv = np.argmin(rt, axis=0)
                best = rt[piv, cols]
                in_bunch = (rt < thresh[None, :]) & (sample[:, None] != cols[None, :])
                chosen = in_bunch.copy()
                has_pivot = best < INF
                chosen[piv[has_pivot], cols[has_pivot]] = True
                chosen[np.arange(len(sample)), sample] = False  # no self-pairs
                bunch_total += in_bunch.sum(axis=0)
                jj, uu = np.nonzero(chosen)
                ss = sample[jj]
                # (u, s) weighs d(u, s); (s, u) weighs d(s, u)
                srcs += [uu, ss]
                dsts += [ss, uu]
                wts += [d_to[jj, uu], d_from[jj, uu]]
                rec.update(bunch_mean=float(in_bunch.sum()) / n, synthetic_new=2 * len(jj))
                alive, rec["removed"] = sparsify_step(g, alive, sample, d_from, d_to)
            if t == delta - 1:
                thresh = best
                if trace:
                    thresholds.append(thresh.copy())
            iters.append(rec)
        round_bunch.append(float(bunch_total.mean()))
    residual = np.flatnonzero(alive)
    srcs.append(g.src[residual])
    dsts.append(g.dst[residual])
    wts.append(g.wt[residual])
    stats = {
        "k_requested": int(k),
        "k": k_used,
        "delta": delta,
        "alpha": sched.alpha if sched else None,
        "iterations": iters,
        "round_bunch_mean": round_bunch,
        "dijkstra_count": DIJKSTRA_COUNTER.count - calls0,
        "residual_edges": int(len(residual)),
    }
    if trace:
        stats["thresholds"] = thresholds
    res = EmulatorResult(n, k_used, _cat(srcs), _cat(dsts), _cat(wts), residual, stats)
    stats["emulator_edges"] = res.size
    stats["synthetic_records"] = int(len(res.src))
    return res


def _cat(parts) -> np.ndarray:
    return np.concatenate(parts).astype(np.int64)


def roundtrip_from_distances_pair(d_from: np.ndarray, d_to: np.ndarray) -> np.ndarray:
    inf = (d_from == INF) | (d_to == INF)
    rt = np.where(inf, 0, d_from) + np.where(inf, 0, d_to)
    rt[inf] = INF
    return rt


def emulator_distances(result: EmulatorResult) -> WeightedDigraph:
    """H as a graph: parallel synthetic edges collapse to the smallest weight."""
    return WeightedDigraph(result.n, result.src, result.dst, result.wt)
