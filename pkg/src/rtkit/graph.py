"""Weighted directed graphs stored as immutable compressed adjacency arrays.

Edges are kept in canonical order, sorted by ``(u, v)``; an edge's id is its
position in that order.  Both the out- and in-adjacency are materialised so
that in-Dijkstra never has to build a transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

INF = int(np.iinfo(np.int64).max)

# Kernels evaluate expressions like 4*d(a,b) + 3*d(c,d) in int64; keeping every
# finite path weight below 2**58 leaves headroom for those multipliers.
MAX_PATH_WEIGHT = 1 << 58


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def sat_add(a: int, b: int) -> int:
    """Saturating addition for distances: anything plus INF stays INF."""
    if a == INF or b == INF:
        return INF
    return min(a + b, INF)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _csr(n: int, keys: np.ndarray, nbr: np.ndarray, wt: np.ndarray, eid: np.ndarray):
    order = np.lexsort((nbr, keys))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, nbr[order].copy(), wt[order].copy(), eid[order].copy()


class WeightedDigraph:
    """Directed graph on vertices ``0..n-1`` with non-negative integer weights.

    Self-loops are rejected.  Parallel edges collapse to the minimum weight.
    Instances are immutable; every array attribute is read-only.
    """

    def __init__(self, n: int, src, dst, wt):
        n = int(n)
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        wt = np.asarray(wt, dtype=np.int64).ravel()
        if not (len(src) == len(dst) == len(wt)):
            raise GraphError("edge arrays differ in length")
        if len(src):
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphError("vertex id out of range")
            if (wt < 0).any():
                raise GraphError("negative edge weight")
            if (src == dst).any():
                raise GraphError("self-loop")
            if int(wt.max()) * max(n, 1) >= MAX_PATH_WEIGHT:
                raise GraphError("edge weights too large for exact int64 arithmetic")
            # min-weight dedupe: sort by (u, v, w) and keep the first of each pair
            order = np.lexsort((wt, dst, src))
            src, dst, wt = src[order], dst[order], wt[order]
            keep = np.ones(len(src), dtype=bool)
            keep[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            src, dst, wt = src[keep], dst[keep], wt[keep]

        self.n = n
        self.m = len(src)
        self.src = _frozen(src.copy())
        self.dst = _frozen(dst.copy())
        self.wt = _frozen(wt.copy())
        eid = np.arange(self.m, dtype=np.int64)
        self.out_ptr, self.out_nbr, self.out_wt, self.out_eid = map(
            _frozen, _csr(n, self.src, self.dst, self.wt, eid)
        )
        self.in_ptr, self.in_nbr, self.in_wt, self.in_eid = map(
            _frozen, _csr(n, self.dst, self.src, self.wt, eid)
        )

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]]) -> "WeightedDigraph":
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [])
        src, dst, wt = zip(*edges)
        return cls(n, src, dst, wt)

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.wt, other.wt)
        )

    __hash__ = None

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for u, v, w in zip(self.src.tolist(), self.dst.tolist(), self.wt.tolist()):
            yield u, v, w

    def out_adj(self, u: int) -> list[tuple[int, int]]:
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return list(zip(self.out_nbr[lo:hi].tolist(), self.out_wt[lo:hi].tolist()))

    def in_adj(self, v: int) -> list[tuple[int, int]]:
        lo, hi = self.in_ptr[v], self.in_ptr[v + 1]
        return list(zip(self.in_nbr[lo:hi].tolist(), self.in_wt[lo:hi].tolist()))

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def edge_id(self, u: int, v: int) -> int:
        """Id of edge ``(u, v)``, or -1 when absent."""
        lo, hi = int(self.out_ptr[u]), int(self.out_ptr[u + 1])
        k = lo + int(np.searchsorted(self.out_nbr[lo:hi], v))
        if k < hi and self.out_nbr[k] == v:
            return k
        return -1

    def weight(self, u: int, v: int) -> int | None:
        k = self.edge_id(u, v)
        return None if k < 0 else int(self.wt[k])

    def transpose(self) -> "WeightedDigraph":
        return WeightedDigraph(self.n, self.dst, self.src, self.wt)

    def edge_subgraph(self, edge_ids) -> "WeightedDigraph":
        """Spanning subgraph on all ``n`` vertices keeping only ``edge_ids``.

        ``edge_ids`` may also be a boolean mask over edge ids.
        """
        ids = np.asarray(edge_ids)
        if ids.dtype != bool:
            ids = ids.astype(np.int64)
        return WeightedDigraph(self.n, self.src[ids], self.dst[ids], self.wt[ids])

    def induced_subgraph(self, vertices) -> tuple["WeightedDigraph", np.ndarray]:
        """Subgraph induced by ``vertices``, relabelled ``0..k-1`` in the given order.

        Returns the subgraph and the array mapping new labels to old ones.
        """
        verts = np.asarray(vertices, dtype=np.int64)
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[verts] = np.arange(len(verts))
        keep = (relabel[self.src] >= 0) & (relabel[self.dst] >= 0)
        sub = WeightedDigraph(
            len(verts), relabel[self.src[keep]], relabel[self.dst[keep]], self.wt[keep]
        )
        return sub, verts

    def is_subgraph_of(self, other: "WeightedDigraph") -> bool:
        if self.n != other.n:
            return False
        for u, v, w in self.edges():
            if other.weight(u, v) != w:
                return False
        return True


def parse_graph(text: str | bytes) -> WeightedDigraph:
    """Parse the ``n m`` header plus ``u v w`` edge-line format."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    header = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ParseError(lineno, f"non-integer token in {line!r}") from None
        if header is None:
            if len(nums) != 2 or nums[0] < 0 or nums[1] < 0:
                raise ParseError(lineno, "header must be 'n m' with non-negative integers")
            header = nums
            n = nums[0]
            continue
        if len(nums) != 3:
            raise ParseError(lineno, "edge line must be 'u v w'")
        u, v, w = nums
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(lineno, f"vertex id out of range [0, {n})")
        if w < 0:
            raise ParseError(lineno, "negative weight")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        edges.append((u, v, w))
        if len(edges) > header[1]:
            raise ParseError(lineno, f"more than {header[1]} edge lines")
    if header is None:
        raise ParseError(1, "missing header")
    if len(edges) != header[1]:
        raise ParseError(len(lines), f"expected {header[1]} edge lines, found {len(edges)}")
    try:
        return WeightedDigraph.from_edges(header[0], edges)
    except GraphError as exc:
        raise ParseError(1, str(exc)) from None


def serialize_graph(g: WeightedDigraph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v} {w}" for u, v, w in g.edges())
    return "\n".join(out) + "\n"


def read_graph(path: str | Path) -> WeightedDigraph:
    return parse_graph(Path(path).read_bytes())


def write_graph(g: WeightedDigraph, path: str | Path) -> None:
    Path(path).write_text(serialize_graph(g), encoding="utf-8")


@dataclass
class SccDecomposition:
    comp: np.ndarray
    count: int
    members: list[np.ndarray] = field(repr=False)

    def nontrivial(self) -> list[np.ndarray]:
        """Components that can contain a cycle (two or more vertices)."""
        return [c for c in self.members if len(c) > 1]


def scc_decompose(g: WeightedDigraph) -> SccDecomposition:
    """Tarjan's algorithm, iterative.  Components are numbered by smallest vertex."""
    n = g.n
    ptr, nbr = g.out_ptr.tolist(), g.out_nbr.tolist()
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    raw_comp = [-1] * n
    ncomp = 0
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, ptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < ptr[v + 1]:
                work[-1] = (v, k + 1)
                w = nbr[k]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, ptr[w]))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    raw_comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    raw = np.asarray(raw_comp, dtype=np.int64)
    # renumber by first occurrence in vertex order
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n))
    rank = np.empty(ncomp, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(ncomp)
    comp = rank[raw] if n else raw
    order = np.argsort(comp, kind="stable")
    splits = np.cumsum(np.bincount(comp, minlength=ncomp))[:-1] if ncomp else []
    members = np.split(order, splits) if ncomp else []
    return SccDecomposition(comp=comp, count=ncomp, members=members)
