"""Single-source shortest paths: full and pruned Dijkstra, exact girth and APSP."""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels as K
from .graph import INF, WeightedDigraph

OUT = "out"
IN = "in"

_NO_MASK = np.empty(0, dtype=bool)


class DijkstraCounter:
    """Process-wide tally of Dijkstra invocations (full and pruned)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    @property
    def count(self) -> int:
        return self._count

    def add(self, k: int = 1) -> None:
        with self._lock:
            self._count += k


DIJKSTRA_COUNTER = DijkstraCounter()


def _adjacency(g: WeightedDigraph, direction: str):
    if direction == OUT:
        return g.out_ptr, g.out_nbr, g.out_wt, g.out_eid
    if direction == IN:
        return g.in_ptr, g.in_nbr, g.in_wt, g.in_eid
    raise ValueError(f"direction must be 'out' or 'in', not {direction!r}")


@dataclass
class DistanceArray:
    """Distances from (``out``) or to (``in``) ``source``; ``pred`` holds edge ids."""

    source: int
    direction: str
    dist: np.ndarray
    pred: np.ndarray = field(repr=False)
    graph: WeightedDigraph = field(repr=False)

    def __getitem__(self, v: int) -> int:
        return int(self.dist[v])

    def path(self, v: int) -> list[int] | None:
        """Vertex sequence of the recorded shortest path between ``source`` and ``v``.

        For ``out`` the path runs source -> v; for ``in`` it runs v -> source.
        """
        if self.dist[v] == INF:
            return None
        g = self.graph
        seq = [v]
        x = v
        while x != self.source:
            e = self.pred[x]
            x = int(g.src[e]) if self.direction == OUT else int(g.dst[e])
            seq.append(x)
        if self.direction == OUT:
            seq.reverse()
        return seq


def dijkstra(
    g: WeightedDigraph,
    source: int,
    direction: str = OUT,
    restrict=None,
    alive=None,
) -> DistanceArray:
    """Exact distances from ``source`` (``out``) or into it (``in``).

    ``restrict`` limits the search to an induced subgraph (vertex mask or
    vertex list); ``alive`` masks edges by id.
    """
    ptr, nbr, wt, eid = _adjacency(g, direction)
    mask = _NO_MASK
    if restrict is not None:
        restrict = np.asarray(restrict)
        if restrict.dtype != bool:
            m = np.zeros(g.n, dtype=bool)
            m[restrict.astype(np.int64)] = True
            restrict = m
        if not restrict[source]:
            raise ValueError("source must lie inside the restricted vertex set")
        mask = restrict
    alive = _NO_MASK if alive is None else np.asarray(alive, dtype=bool)
    dist = np.full(g.n, INF, dtype=np.int64)
    pred = np.full(g.n, -1, dtype=np.int64)
    K.dijkstra_into(ptr, nbr, wt, eid, alive, mask, int(source), dist, pred)
    DIJKSTRA_COUNTER.add(1)
    return DistanceArray(int(source), direction, dist, pred, g)


def multi_source(
    g: WeightedDigraph, sources, direction: str = OUT, alive=None, with_pred: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Row ``i`` holds the distance array for ``sources[i]``; counts one call per source."""
    ptr, nbr, wt, eid = _adjacency(g, direction)
    sources = np.asarray(sources, dtype=np.int64)
    alive = _NO_MASK if alive is None else np.asarray(alive, dtype=bool)
    dist, pred = K.multi_dijkstra(ptr, nbr, wt, eid, alive, sources, with_pred)
    DIJKSTRA_COUNTER.add(len(sources))
    return dist, pred


@dataclass
class BallSet:
    """Vertices accepted by a pruned search, with their settled distances."""

    owner: int
    variant: str
    dist: dict[int, int]

    @property
    def members(self) -> set[int]:
        return set(self.dist)

    def __contains__(self, u: int) -> bool:
        return u in self.dist

    def __len__(self) -> int:
        return len(self.dist)


PruneHook = Callable[[int, int], bool]


def pruned_dijkstra(
    g: WeightedDigraph, source: int, direction: str, hook: PruneHook, variant: str = "pruned"
) -> BallSet:
    """Dijkstra that only relaxes out of vertices accepted by ``hook(u, D[u])``.

    The hook runs once per vertex, when it is settled (the source included).
    The returned ball is the set of settled vertices the hook accepted.
    This is the reference implementation; the girth pipeline uses compiled
    searches specialised to its hooks.
    """
    ptr, nbr, wt, _ = _adjacency(g, direction)
    ptr, nbr, wt = ptr.tolist(), nbr.tolist(), wt.tolist()
    dist = {source: 0}
    done = set()
    accepted: dict[int, int] = {}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if not hook(u, d):
            continue
        accepted[u] = d
        for k in range(ptr[u], ptr[u + 1]):
            x = nbr[k]
            nd = d + wt[k]
            if nd < dist.get(x, INF):
                dist[x] = nd
                heapq.heappush(heap, (nd, x))
    DIJKSTRA_COUNTER.add(1)
    return BallSet(owner=source, variant=variant, dist=accepted)


def distance_matrix(g: WeightedDigraph, alive=None) -> np.ndarray:
    """``D[u, v] = d(u, v)`` for all pairs via ``n`` out-Dijkstras."""
    dist, _ = multi_source(g, np.arange(g.n), OUT, alive=alive)
    return dist


def roundtrip_from_distances(dist: np.ndarray) -> np.ndarray:
    both = dist.T
    inf = (dist == INF) | (both == INF)
    rt = np.where(inf, 0, dist) + np.where(inf, 0, both)
    rt[inf] = INF
    return rt


def exact_roundtrip_apsp(g: WeightedDigraph) -> np.ndarray:
    """Symmetric matrix of roundtrip distances ``d(u,v) + d(v,u)``."""
    return roundtrip_from_distances(distance_matrix(g))


def exact_girth(g: WeightedDigraph, gadget=None) -> int:
    """Weight of the shortest directed cycle; INF for acyclic graphs.

    When ``gadget`` (an edge mask) is given, only cycles through at least one
    non-gadget edge count.
    """
    if g.m == 0:
        return INF
    dist = distance_matrix(g)
    closing = dist[g.dst, g.src]  # d(v, u) for each edge (u, v)
    ok = closing != INF
    if gadget is not None:
        ok &= ~np.asarray(gadget, dtype=bool)
    if not ok.any():
        return INF
    return int((closing[ok] + g.wt[ok]).min())
