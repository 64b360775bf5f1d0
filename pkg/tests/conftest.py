"""Independent oracles and hypothesis strategies shared by the test modules.

The oracles deliberately avoid the package's Dijkstra so they can judge it.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rtkit.girth4 import GirthConfig, GirthRun
from rtkit.girth4.phases import compute_eliminators_1, compute_eliminators_2, phase1, phase2, phase3
from rtkit.graph import INF, WeightedDigraph
from rtkit.sssp import IN, OUT

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")


def bellman_ford(g: WeightedDigraph, source: int) -> list[int]:
    dist = [INF] * g.n
    dist[source] = 0
    edges = list(g.edges())
    for _ in range(g.n):
        changed = False
        for u, v, w in edges:
            if dist[u] != INF and dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    return dist


def floyd_warshall(g: WeightedDigraph) -> list[list[int]]:
    n = g.n
    d = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for u, v, w in g.edges():
        d[u][v] = min(d[u][v], w)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in range(n):
                if dk[j] != INF and dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def reachability(g: WeightedDigraph) -> np.ndarray:
    """Transitive closure by repeated boolean squaring."""
    r = np.eye(g.n, dtype=bool)
    r[g.src, g.dst] = True
    while True:
        nxt = r | ((r.astype(np.int64) @ r.astype(np.int64)) > 0)
        if (nxt == r).all():
            return r
        r = nxt


def simple_cycles(g: WeightedDigraph):
    """Every simple directed cycle, each listed once starting at its smallest vertex."""
    adj = {u: [v for v, _ in g.out_adj(u)] for u in range(g.n)}
    for start in range(g.n):
        stack = [(start, [start])]
        while stack:
            u, path = stack.pop()
            for v in adj[u]:
                if v == start:
                    yield list(path)
                elif v > start and v not in path:
                    stack.append((v, path + [v]))


def cycle_weight_oracle(g: WeightedDigraph, cycle) -> int:
    return sum(g.weight(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1]))


def brute_girth(g: WeightedDigraph) -> int:
    return min((cycle_weight_oracle(g, c) for c in simple_cycles(g)), default=INF)


def random_graph(rng: np.random.Generator, n: int, m: int, lo: int = 0, hi: int = 10,
                 strongly_connected: bool = False) -> WeightedDigraph:
    pairs = [(u, v) for u, v in itertools.permutations(range(n), 2)]
    chosen = set()
    if strongly_connected:
        order = rng.permutation(n).tolist()
        chosen.update(zip(order, order[1:] + order[:1]))
    idx = rng.permutation(len(pairs))
    for i in idx:
        if len(chosen) >= m:
            break
        chosen.add(pairs[i])
    chosen = sorted(chosen)
    w = rng.integers(lo, hi + 1, len(chosen))
    return WeightedDigraph(n, [a for a, _ in chosen], [b for _, b in chosen], w)


@st.composite
def digraphs(draw, min_n=1, max_n=9, max_w=10, strongly_connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = set(draw(st.lists(st.sampled_from(pairs), max_size=3 * n, unique=True))) if pairs else set()
    if strongly_connected and n > 1:
        perm = draw(st.permutations(range(n)))
        chosen.update(zip(perm, perm[1:] + perm[:1]))
    chosen = sorted(chosen)
    w = draw(st.lists(st.integers(0, max_w), min_size=len(chosen), max_size=len(chosen)))
    return WeightedDigraph(n, [a for a, _ in chosen], [b for _, b in chosen], w)


def cycle_graph(n: int, w: int = 1) -> WeightedDigraph:
    return WeightedDigraph(n, range(n), [(i + 1) % n for i in range(n)], [w] * n)


STRESSED = GirthConfig(c1=1, c2=1, cap_scale=1e6, regularize=False)


def staged(g, config=STRESSED, seed=0, upto=3, origin=None, gadget=None):
    """Run the girth phases by hand; ``run.after[p]`` is the estimate after phase p."""
    if origin is None:
        origin = np.arange(g.n, dtype=np.int64)
        gadget = np.zeros(g.m, bool)
    run = GirthRun(g, origin, gadget, config, np.random.default_rng(seed))
    phase1(run)
    run.after = {1: run.best.value}
    compute_eliminators_1(run, OUT)
    compute_eliminators_1(run, IN)
    if upto >= 2:
        phase2(run)
        run.after[2] = run.best.value
        compute_eliminators_2(run)
    if upto >= 3:
        phase3(run)
        run.after[3] = run.best.value
    return run


def r1out(run):
    return lambda x: run.s1_vert[run.R1out[x, :run.R1out_cnt[x]]].tolist()


def r1in(run):
    return lambda x: run.s1_vert[run.R1in[x, :run.R1in_cnt[x]]].tolist()


def r2in(run, v):
    return run.s2_vert[run.R2[v, :run.R2cnt[v]]].tolist()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
