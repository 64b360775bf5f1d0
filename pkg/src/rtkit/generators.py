"""Seeded synthetic graph generators."""

from __future__ import annotations

import math

import numpy as np

from .graph import GraphError, WeightedDigraph

KINDS = ("cycle", "random-gnm", "random-scc", "layered", "complete")


def _pairs_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # index over the n*(n-1) ordered pairs without self-loops
    u = idx // (n - 1)
    r = idx % (n - 1)
    v = r + (r >= u)
    return u, v


def _weights(rng: np.random.Generator, count: int, weight_range) -> np.ndarray:
    lo, hi = (int(x) for x in weight_range)
    if lo < 0 or hi < lo:
        raise GraphError(f"bad weight range [{lo}, {hi}]")
    return rng.integers(lo, hi + 1, size=count, dtype=np.int64)


def generate(
    kind: str,
    n: int,
    m: int | None = None,
    weight_range=(1, 1),
    seed: int = 0,
) -> WeightedDigraph:
    """Build a graph of the given ``kind``; identical arguments give identical graphs.

    ``random-scc`` is a random Hamiltonian cycle plus ``m - n`` further
    distinct random edges, so the result is always strongly connected.
    ``layered`` spreads vertices over ceil(sqrt(n)) layers and only draws
    edges from one layer to the next, so it is acyclic.
    """
    if kind not in KINDS:
        raise GraphError(f"unknown generator kind {kind!r}; choose from {', '.join(KINDS)}")
    n = int(n)
    if n < 1:
        raise GraphError("n must be positive")
    rng = np.random.default_rng(seed)
    full = n * (n - 1)

    if kind == "cycle":
        if n < 2:
            raise GraphError("a cycle needs at least 2 vertices")
        src = np.arange(n)
        return WeightedDigraph(n, src, (src + 1) % n, _weights(rng, n, weight_range))

    if kind == "complete":
        if m is not None and m != full:
            raise GraphError(f"complete graph on {n} vertices has exactly {full} edges")
        u, v = _pairs_from_index(np.arange(full, dtype=np.int64), n) if n > 1 else ([], [])
        return WeightedDigraph(n, u, v, _weights(rng, full, weight_range))

    if m is None:
        raise GraphError(f"kind {kind!r} needs an edge count m")
    m = int(m)
    if m < 0:
        raise GraphError("m must be non-negative")

    if kind == "random-gnm":
        if m > full:
            raise GraphError(f"m={m} exceeds the {full} possible edges on {n} vertices")
        idx = np.sort(rng.choice(full, size=m, replace=False)) if m else np.zeros(0, np.int64)
        u, v = _pairs_from_index(idx, n) if n > 1 else (idx, idx)
        return WeightedDigraph(n, u, v, _weights(rng, m, weight_range))

    if kind == "random-scc":
        if n < 2:
            raise GraphError("random-scc needs at least 2 vertices")
        if m < n or m > full:
            raise GraphError(f"random-scc needs n <= m <= {full}, got m={m}")
        perm = rng.permutation(n)
        cu, cv = perm, np.roll(perm, -1)
        cyc_idx = cu * (n - 1) + cv - (cv > cu)
        extra = m - n
        want = min(full, extra + n)
        cand = rng.choice(full, size=want, replace=False)
        cand = cand[~np.isin(cand, cyc_idx)][:extra]
        idx = np.concatenate((cyc_idx, np.sort(cand)))
        u, v = _pairs_from_index(idx, n)
        return WeightedDigraph(n, u, v, _weights(rng, m, weight_range))

    # layered
    layers = max(1, math.ceil(math.sqrt(n)))
    layer = np.arange(n) * layers // n
    sizes = np.bincount(layer, minlength=layers)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    block = sizes[:-1] * sizes[1:]
    allowed = int(block.sum())
    if m > allowed:
        raise GraphError(f"m={m} exceeds the {allowed} layer-to-layer pairs")
    idx = np.sort(rng.choice(allowed, size=m, replace=False)) if m else np.zeros(0, np.int64)
    bstart = np.concatenate(([0], np.cumsum(block)))
    which = np.searchsorted(bstart, idx, side="right") - 1
    off = idx - bstart[which]
    u = starts[which] + off // sizes[which + 1]
    v = starts[which + 1] + off % sizes[which + 1]
    return WeightedDigraph(n, u, v, _weights(rng, m, weight_range))
