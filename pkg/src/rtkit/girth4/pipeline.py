"""Orchestration: SCC split, regularization, restarts, witness recovery."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..graph import INF, WeightedDigraph, scc_decompose
from ..regularize import regularize
from ..sssp import DIJKSTRA_COUNTER, IN, OUT, dijkstra
from .config import GirthConfig
from .phases import (
    CapExceeded,
    GirthInvariantError,
    GirthRun,
    compute_eliminators_1,
    compute_eliminators_2,
    phase1,
    phase2,
    phase3,
    phase3_single,
)


class RetryLimitExceeded(RuntimeError):
    pass


@dataclass
class GirthEstimate:
    value: int  # INF when the graph is acyclic
    witness: list[int] | None  # vertex sequence of a cycle of weight ``value``
    phase: int | None
    stats: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.value != INF


def cycle_weight(g: WeightedDigraph, cycle) -> int:
    """Weight of the closed vertex sequence ``cycle`` (last vertex returns to the first)."""
    total = 0
    for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        w = g.weight(a, b)
        if w is None:
            raise ValueError(f"({a}, {b}) is not an edge")
        total += w
    return total


def lightest_simple_cycle(g: WeightedDigraph, walk: list[int]) -> list[int]:
    """Split a closed walk into simple cycles and return the lightest one."""
    stack: list[int] = []
    pos: dict[int, int] = {}
    cycles = []
    for x in walk + walk[:1]:
        if x in pos:
            i = pos[x]
            cycles.append(stack[i:])
            for y in stack[i + 1:]:
                del pos[y]
            del stack[i + 1:]
        else:
            pos[x] = len(stack)
            stack.append(x)
    return min(cycles, key=lambda c: cycle_weight(g, c))


def run_phases(run: GirthRun) -> None:
    phase1(run)
    compute_eliminators_1(run, OUT)
    compute_eliminators_1(run, IN)
    phase2(run)
    compute_eliminators_2(run)
    phase3(run)
    if run.stats["phase1_dijkstra"] != 2 * run.stats["s1_distinct"]:
        raise GirthInvariantError("first-phase Dijkstra budget mismatch")


def _walk(run: GirthRun) -> list[int]:
    """Closed walk in the searched graph realising the best candidate."""
    c = run.best
    h = run.graph
    if c.phase in (1, 2):
        there = dijkstra(h, c.anchor, OUT).path(c.other)
        back = dijkstra(h, c.anchor, IN).path(c.other)
        return there[:-1] + back[:-1]
    _, dist, pred, val, u = phase3_single(run, c.anchor)
    if val != c.value:
        raise GirthInvariantError("phase-3 replay disagrees with the recorded candidate")
    seq = [c.anchor]
    x = c.other
    while pred[x] >= 0:
        seq.append(x)
        x = int(h.dst[pred[x]])
    seq.append(x)
    return seq


def _histogram(sizes) -> dict:
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.size == 0:
        return {}
    buckets = np.floor(np.log2(np.maximum(sizes, 1))).astype(np.int64)
    keys, counts = np.unique(buckets, return_counts=True)
    return {f"<{2 ** (int(k) + 1)}": int(c) for k, c in zip(keys, counts)}


def _component_stats(run: GirthRun, attempts: int) -> dict:
    s = run.stats
    return {
        "n": run.n,
        "m": run.graph.m,
        "attempts": attempts,
        "s1_size": s["s1_size"],
        "s1_distinct": s["s1_distinct"],
        "s2_size": s["s2_size"],
        "s2_distinct": s["s2_distinct"],
        "rounds": run.rounds,
        "r1_out_max": s["r1_out_max"],
        "r1_in_max": s["r1_in_max"],
        "r2_in_max": s["r2_in_max"],
        "phase1_dijkstra": s["phase1_dijkstra"],
        "phase2_dijkstra": s["phase2_dijkstra"],
        "phase3_dijkstra": s["phase3_dijkstra"],
        "discarded_dijkstra": s["discarded_dijkstra"],
        "witness_dijkstra": 0,
        "ball2_out_max": int(np.max(s["ball2_out_sizes"], initial=0)),
        "ball2_in_max": int(np.max(s["ball2_in_sizes"], initial=0)),
        "ball3_max": int(np.max(s["ball3_sizes"], initial=0)),
        "ball2_out_hist": _histogram(s["ball2_out_sizes"]),
        "ball3_hist": _histogram(s["ball3_sizes"]),
        "best_phase": run.best.phase,
        "best_candidate": None if run.best.value == INF else run.best.value,
    }


def solve_component(h: WeightedDigraph, origin: np.ndarray, gadget: np.ndarray,
                    config: GirthConfig, rng: np.random.Generator) -> tuple[GirthRun, int]:
    """Run all phases on one strongly connected graph, restarting on cap breaches.

    Dijkstra calls spent on abandoned attempts land in ``run.stats["discarded_dijkstra"]``.
    """
    c0 = DIJKSTRA_COUNTER.count
    for attempt in range(config.retry_limit + 1):
        run = GirthRun(h, origin, gadget, config, rng)
        c1 = DIJKSTRA_COUNTER.count
        try:
            run_phases(run)
        except CapExceeded:
            continue
        run.stats["discarded_dijkstra"] = c1 - c0
        return run, attempt + 1
    raise RetryLimitExceeded(f"ball-size cap exceeded on {config.retry_limit + 1} attempts")


def approx_girth_4(g: WeightedDigraph, seed: int = 0, config: GirthConfig | None = None,
                   timings: bool = False) -> GirthEstimate:
    """Girth estimate g' with g <= g' <= 4g and a witness cycle of weight g'.

    Every nontrivial strongly connected component is searched separately (in
    order of its smallest vertex) with one shared random generator.
    """
    config = config or GirthConfig()
    rng = np.random.default_rng(seed)
    c0 = DIJKSTRA_COUNTER.count
    t0 = time.perf_counter()
    scc = scc_decompose(g)
    best_val, best_cycle, best_phase = INF, None, None
    comps = []
    retries = 0
    for members in scc.nontrivial():
        sub, verts = g.induced_subgraph(members)
        if config.regularize:
            reg = regularize(sub)
            h, origin, gadget = reg.graph, reg.vertex_origin, reg.gadget
        else:
            h, origin, gadget = sub, np.arange(sub.n, dtype=np.int64), np.zeros(sub.m, bool)
        tc = time.perf_counter()
        run, attempts = solve_component(h, origin, gadget, config, rng)
        retries += attempts - 1
        info = _component_stats(run, attempts)
        if run.best.value < INF:
            cw = DIJKSTRA_COUNTER.count
            walk = [int(verts[o]) for o in _origin_walk(_walk(run), origin)]
            info["witness_dijkstra"] = DIJKSTRA_COUNTER.count - cw
            cyc = lightest_simple_cycle(g, walk)
            w = cycle_weight(g, cyc)
            if w > run.best.value:
                raise GirthInvariantError("witness heavier than its candidate")
            info["witness_weight"] = w
            if w < best_val:
                best_val, best_cycle, best_phase = w, cyc, run.best.phase
        if timings:
            info["seconds"] = time.perf_counter() - tc
        comps.append(info)
    stats = {
        "components": comps,
        "scc_count": scc.count,
        "retries": retries,
        "dijkstra_count": DIJKSTRA_COUNTER.count - c0,
        "config": config.as_dict(),
    }
    if timings:
        stats["seconds"] = time.perf_counter() - t0
    return GirthEstimate(best_val, best_cycle, best_phase, stats)


def _origin_walk(walk, origin) -> list[int]:
    out: list[int] = []
    for x in walk:
        o = int(origin[x])
        if not out or out[-1] != o:
            out.append(o)
    while len(out) > 1 and out[-1] == out[0]:
        out.pop()
    return out
