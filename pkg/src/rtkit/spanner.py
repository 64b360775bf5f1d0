"""3-roundtrip spanner by iterated sampling and neighbourhood sparsification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .graph import WeightedDigraph
from .sssp import DIJKSTRA_COUNTER, IN, OUT, multi_source


@dataclass(frozen=True)
class Schedule:
    """Iteration count ``delta`` and growth rate ``alpha`` with alpha**delta = n**exponent.

    ``alpha`` is kept as its logarithm so that powers stay exact in the log domain.
    """

    n: int
    exponent: float
    delta: int
    log_alpha: float

    @property
    def alpha(self) -> float:
        return math.exp(self.log_alpha)

    def sample_prob(self, i: int) -> float:
        return min(1.0, math.exp(i * self.log_alpha - math.log(self.n)))


def make_schedule(n: int, target_exponent: float = 0.5) -> Schedule:
    """delta = ceil(log_{3/2} n**e) and alpha = (n**e)**(1/delta)."""
    if n < 2:
        raise ValueError("schedule needs n >= 2")
    log_target = target_exponent * math.log(n)
    # tolerance keeps exact powers of 3/2 from rounding up an extra step
    delta = max(1, math.ceil(log_target / math.log(1.5) - 1e-9))
    return Schedule(n=n, exponent=target_exponent, delta=delta, log_alpha=log_target / delta)


def sample_vertices(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """Each vertex independently with probability ``p``; draws exactly ``n`` uniforms."""
    return np.flatnonzero(rng.random(n) < p).astype(np.int64)


def sparsify_step(g: WeightedDigraph, alive: np.ndarray, sample: np.ndarray,
                  d_from: np.ndarray, d_to: np.ndarray) -> tuple[np.ndarray, int]:
    """Return the next edge mask after one elimination sweep and the number removed.

    ``d_from[j]`` and ``d_to[j]`` are distances from and to ``sample[j]``.
    """
    s_row = np.full(g.n, -1, dtype=np.int64)
    s_row[sample] = np.arange(len(sample))
    nxt = alive.copy()
    removed = K.eliminate_scan(g.out_ptr, g.out_nbr, g.out_wt, g.out_eid,
                               alive, nxt, s_row, d_to, d_from)
    return nxt, int(removed)


@dataclass
class SpannerResult:
    graph: WeightedDigraph
    edges: np.ndarray  # edge ids of the input graph kept in the spanner
    schedule: Schedule | None
    stats: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.edges)


def build_3_spanner(g: WeightedDigraph, seed: int = 0) -> SpannerResult:
    """Subgraph H with d_H(u<->v) <= 3 d_G(u<->v) for every pair.

    Draw order: one ``random(n)`` vector per iteration.
    """
    n, m = g.n, g.m
    if n < 2:
        return SpannerResult(g.edge_subgraph(np.arange(m)), np.arange(m), None,
                             {"iterations": [], "dijkstra_count": 0, "tree_edges": 0,
                              "residual_edges": m, "spanner_edges": m})
    sched = make_schedule(n, 0.5)
    rng = np.random.default_rng(seed)
    alive = np.ones(m, dtype=bool)
    in_h = np.zeros(m, dtype=bool)
    iters = []
    calls0 = DIJKSTRA_COUNTER.count
    for i in range(sched.delta):
        sample = sample_vertices(rng, n, sched.sample_prob(i))
        rec = {"i": i, "sample_size": int(len(sample)), "edges_before": int(alive.sum())}
        if len(sample):
            # distances on the original graph, not on the sparsified one
            d_from, p_from = multi_source(g, sample, OUT, with_pred=True)
            d_to, p_to = multi_source(g, sample, IN, with_pred=True)
            before = int(in_h.sum())
            in_h[p_from[p_from >= 0]] = True
            in_h[p_to[p_to >= 0]] = True
            rec["tree_edges_new"] = int(in_h.sum()) - before
            alive, rec["removed"] = sparsify_step(g, alive, sample, d_from, d_to)
        else:
            rec["tree_edges_new"] = 0
            rec["removed"] = 0
        iters.append(rec)
    tree_edges = int(in_h.sum())
    residual = int(alive.sum())
    in_h |= alive
    edges = np.flatnonzero(in_h)
    stats = {
        "iterations": iters,
        "dijkstra_count": DIJKSTRA_COUNTER.count - calls0,
        "sample_total": sum(r["sample_size"] for r in iters),
        "tree_edges": tree_edges,
        "residual_edges": residual,
        "spanner_edges": int(len(edges)),
        "delta": sched.delta,
        "alpha": sched.alpha,
    }
    return SpannerResult(g.edge_subgraph(edges), edges, sched, stats)
