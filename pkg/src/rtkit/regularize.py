"""Degree regularization: split high-degree vertices into zero-weight gadget cycles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedDigraph


@dataclass
class RegularizedGraph:
    graph: WeightedDigraph
    vertex_origin: np.ndarray  # vertex of the regularized graph -> original vertex
    gadget: np.ndarray  # per edge id: True for zero-weight intra-gadget edges
    degree_cap: int

    def origin_cycle(self, walk) -> list[int]:
        """Map a closed walk of the regularized graph back to original vertices.

        Consecutive copies of the same vertex (gadget steps) are collapsed.
        """
        out: list[int] = []
        for x in walk:
            o = int(self.vertex_origin[x])
            if not out or out[-1] != o:
                out.append(o)
        while len(out) > 1 and out[-1] == out[0]:
            out.pop()
        return out


def regularize(g: WeightedDigraph) -> RegularizedGraph:
    """Replace each vertex of total degree d by ceil(d / cap) copies, cap = ceil(2m/n).

    Copy 0 keeps the original id; extra copies are appended after ``n``.  The
    incident edges of a vertex (out-edges then in-edges, each sorted by the
    other endpoint) go round-robin to its copies, and the copies are joined
    by a directed zero-weight cycle.
    """
    n, m = g.n, g.m
    if n == 0:
        return RegularizedGraph(g, np.arange(0, dtype=np.int64), np.zeros(0, bool), 1)
    cap = max(1, -(-2 * m // n))
    outdeg = g.out_degree()
    indeg = g.in_degree()
    deg = outdeg + indeg
    copies = np.maximum(1, -(-deg // cap))
    extra = copies - 1
    first_extra = n + np.concatenate(([0], np.cumsum(extra)[:-1]))
    total = n + int(extra.sum())

    def copy_id(v, j):
        j = j % copies[v]
        return np.where(j == 0, v, first_extra[v] + j - 1)

    # position of each edge inside the incident lists of its tail and head
    eid_out = g.out_eid
    pos_tail = np.empty(m, dtype=np.int64)
    pos_tail[eid_out] = np.arange(m) - np.repeat(g.out_ptr[:-1], outdeg)
    pos_head = np.empty(m, dtype=np.int64)
    pos_head[g.in_eid] = np.arange(m) - np.repeat(g.in_ptr[:-1], indeg)
    pos_head += outdeg[g.dst]

    src = copy_id(g.src, pos_tail)
    dst = copy_id(g.dst, pos_head)

    origin = np.empty(total, dtype=np.int64)
    origin[:n] = np.arange(n)
    origin[n:] = np.repeat(np.arange(n), extra)

    gs, gd = [], []
    for v in np.flatnonzero(copies > 1).tolist():
        ring = [v] + list(range(int(first_extra[v]), int(first_extra[v]) + int(extra[v])))
        gs.extend(ring)
        gd.extend(ring[1:] + ring[:1])
    all_src = np.concatenate((src, np.asarray(gs, dtype=np.int64)))
    all_dst = np.concatenate((dst, np.asarray(gd, dtype=np.int64)))
    all_wt = np.concatenate((g.wt, np.zeros(len(gs), dtype=np.int64)))
    h = WeightedDigraph(total, all_src, all_dst, all_wt)
    gadget = origin[h.src] == origin[h.dst]
    gadget.flags.writeable = False
    origin.flags.writeable = False
    return RegularizedGraph(h, origin, gadget, cap)
