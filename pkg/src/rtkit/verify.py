"""Auditors, brute-force set definitions and lemma harnesses.

Everything here works from exact all-pairs distance tables, so it is meant
for small graphs (a few thousand vertices at most).  All comparisons are
integer; stretch ratios are kept as fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .emulator import EmulatorResult, build_emulator, emulator_distances
from .generators import generate
from .girth4 import GirthConfig, GirthEstimate, cycle_weight
from .girth4.phases import (
    GirthRun,
    compute_eliminators_1,
    phase1,
    phase2,
)
from .graph import INF, WeightedDigraph
from .spanner import SpannerResult, build_3_spanner
from .sssp import IN, OUT, dijkstra, distance_matrix, exact_girth, roundtrip_from_distances

# -- stretch audits ------------------------------------------------------------------


@dataclass
class StretchReport:
    bound: int
    passed: bool
    max_stretch: Fraction | None  # None when no pair has a positive finite roundtrip
    argmax: tuple[int, int] | None
    histogram: dict
    zero_pairs: int
    pairs_checked: int
    subgraph_ok: bool | None = None
    violation: dict | None = None

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "passed": self.passed,
            "max_stretch": None if self.max_stretch is None else str(self.max_stretch),
            "argmax": self.argmax,
            "histogram": self.histogram,
            "zero_pairs": self.zero_pairs,
            "pairs_checked": self.pairs_checked,
            "subgraph_ok": self.subgraph_ok,
            "violation": self.violation,
        }


def _as_graph(h) -> WeightedDigraph:
    if isinstance(h, SpannerResult):
        return h.graph
    if isinstance(h, EmulatorResult):
        return emulator_distances(h)
    return h


def _witness(g: WeightedDigraph, u: int, v: int) -> dict:
    there = dijkstra(g, u, OUT).path(v)
    back = dijkstra(g, v, OUT).path(u)
    return {"u_to_v": there, "v_to_u": back}


_HIST_EDGES = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3),
               Fraction(4), Fraction(5), Fraction(7)]


def audit_spanner(g: WeightedDigraph, h, bound: int, require_subgraph: bool | None = None) -> StretchReport:
    """Check d_G(u<->v) <= d_H(u<->v) <= bound * d_G(u<->v) for every pair.

    ``require_subgraph`` defaults to True for spanner results.  Pairs with
    zero roundtrip in G must have zero roundtrip in H and are kept out of the
    ratio statistics.
    """
    if require_subgraph is None:
        require_subgraph = isinstance(h, SpannerResult)
    hg = _as_graph(h)
    if hg.n != g.n:
        raise ValueError("graphs have different vertex counts")
    rg = roundtrip_from_distances(distance_matrix(g))
    rh = roundtrip_from_distances(distance_matrix(hg))
    n = g.n
    iu, ju = np.triu_indices(n, 1)
    a = rg[iu, ju]
    b = rh[iu, ju]
    finite = a != INF
    upper_bad = finite & ((b == INF) | (b > bound * np.where(finite, a, 0)))
    lower_bad = b < a
    bad = upper_bad | lower_bad
    subgraph_ok = hg.is_subgraph_of(g) if require_subgraph else None
    violation = None
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        u, v = int(iu[k]), int(ju[k])
        violation = {
            "pair": [u, v],
            "kind": "unreachable" if b[k] == INF else ("upper" if upper_bad[k] else "lower"),
            "d_g": None if a[k] == INF else int(a[k]),
            "d_h": None if b[k] == INF else int(b[k]),
            "g_paths": _witness(g, u, v),
            "h_paths": _witness(hg, u, v),
        }
    pos = finite & (a > 0) & (b != INF)
    zero_pairs = int((finite & (a == 0)).sum())
    max_s, argmax = None, None
    hist = {}
    if pos.any():
        # exact maximum of b/a: compare candidates by cross multiplication
        idx = np.flatnonzero(pos)
        ratio = b[idx] / a[idx]
        best = int(idx[np.argmax(ratio)])
        top = ratio.max()
        for k in idx[ratio >= top * (1 - 1e-9)]:
            if Fraction(int(b[k]), int(a[k])) > Fraction(int(b[best]), int(a[best])):
                best = int(k)
        max_s = Fraction(int(b[best]), int(a[best]))
        argmax = (int(iu[best]), int(ju[best]))
        labels = [f"<{e}" for e in _HIST_EDGES[1:]] + [f">={_HIST_EDGES[-1]}"]
        counts = [0] * len(labels)
        for bb, aa in zip(b[idx].tolist(), a[idx].tolist()):
            r = Fraction(bb, aa)
            slot = next((i for i, e in enumerate(_HIST_EDGES[1:]) if r < e), len(labels) - 1)
            counts[slot] += 1
        hist = {lab: c for lab, c in zip(labels, counts) if c}
    passed = violation is None and subgraph_ok is not False
    return StretchReport(bound, passed, max_s, argmax, hist, zero_pairs, int(len(a)),
                         subgraph_ok, violation)


@dataclass
class GirthAudit:
    passed: bool
    exact: int
    estimate: int
    witness_ok: bool
    message: str = ""

    def as_dict(self) -> dict:
        conv = lambda x: None if x == INF else int(x)
        return {"passed": self.passed, "g": conv(self.exact), "g_prime": conv(self.estimate),
                "witness_ok": self.witness_ok, "message": self.message}


def audit_girth(g: WeightedDigraph, est: GirthEstimate | int, witness=None) -> GirthAudit:
    """Check g <= g' <= 4g and that the witness is a cycle of weight g'."""
    if isinstance(est, GirthEstimate):
        value, witness = est.value, est.witness
    else:
        value = int(est)
    exact = exact_girth(g)
    if value == INF or exact == INF:
        ok = value == exact
        return GirthAudit(ok, exact, value, witness is None,
                          "" if ok else "finiteness of estimate and girth disagree")
    witness_ok = False
    if witness:
        try:
            witness_ok = len(set(witness)) == len(witness) and cycle_weight(g, witness) == value
        except ValueError:
            witness_ok = False
    msgs = []
    if value < exact:
        msgs.append(f"estimate {value} below girth {exact}")
    if value > 4 * exact:
        msgs.append(f"estimate {value} above 4 * girth {4 * exact}")
    if not witness_ok:
        msgs.append("witness is not a simple cycle of the reported weight")
    return GirthAudit(not msgs, exact, value, witness_ok, "; ".join(msgs))


# -- brute-force set definitions -----------------------------------------------------
# D is the full distance matrix of the graph the sets live in (D[a, b] = d(a, b)).
# The graph must be strongly connected so every entry is finite.


def _finite(D: np.ndarray) -> np.ndarray:
    if (D == INF).any():
        raise ValueError("brute-force definitions need a strongly connected graph")
    return D.astype(object) if D.max(initial=0) > (1 << 60) else D


def definition_ball2_out(D, v: int, R) -> set[int]:
    D = _finite(D)
    ok = np.ones(D.shape[0], bool)
    for r in R:
        ok &= 2 * D[v, r] + D[r, :] > 2 * D[v, :] + D[:, r]
    return set(np.flatnonzero(ok).tolist())


def definition_ball2_in(D, v: int, R) -> set[int]:
    D = _finite(D)
    ok = np.ones(D.shape[0], bool)
    for r in R:
        ok &= 2 * D[r, v] + D[:, r] > 2 * D[:, v] + D[r, :]
    return set(np.flatnonzero(ok).tolist())


def definition_ball4_out(D, v: int, R) -> set[int]:
    D = _finite(D)
    ok = np.ones(D.shape[0], bool)
    for r in R:
        ok &= 4 * D[v, r] + D[r, :] > 4 * D[v, :] + 3 * D[:, r]
    return set(np.flatnonzero(ok).tolist())


def definition_underestimate_doubled(D, u: int, r2: int, R1in_r2) -> int:
    """Twice the underestimate of d(u, r2) evaluated from its definition."""
    if u in definition_ball2_in(D, r2, R1in_r2):
        return 2 * int(D[u, r2])
    if not R1in_r2:
        return INF
    return min(2 * int(D[r1, r2]) + int(D[u, r1]) - int(D[r1, u]) for r1 in R1in_r2)


def definition_bprime(D, v: int, R1out_of, R1in_of, R2in_v) -> set[int]:
    """B'(v) from its three conditions; ``R1out_of``/``R1in_of`` map a vertex to its eliminators."""
    n = D.shape[0]
    out = set()
    balls2 = {r2: definition_ball2_out(D, r2, R1out_of(r2)) for r2 in R2in_v}
    for s in range(n):
        if v not in definition_ball4_out(D, s, R1out_of(s)):
            continue
        if any(s not in balls2[r2] for r2 in R2in_v):
            continue
        if all(4 * int(D[s, v]) + 2 * int(D[r2, s])
               < 4 * int(D[r2, v]) + definition_underestimate_doubled(D, s, r2, R1in_of(r2))
               for r2 in R2in_v):
            out.add(s)
    return out


# -- lemma harnesses -----------------------------------------------------------------

LEMMAS = ("key-obs", "k-approx", "two-layer", "filter")


@dataclass
class LemmaReport:
    lemma: str
    premise_hits: int
    violations: int
    graphs: int
    k: int | None = None
    examples: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"lemma": self.lemma, "k": self.k, "premise_hits": self.premise_hits,
                "violations": self.violations, "graphs": self.graphs,
                "examples": self.examples}


def harness_graph(rng: np.random.Generator) -> WeightedDigraph:
    """Random strongly connected graph: n in [20, 80], m/n in {2, 8, n/4}, small or wide weights."""
    n = int(rng.integers(20, 81))
    ratio = [2, 8, max(2, n // 4)][int(rng.integers(3))]
    m = min(n * (n - 1), max(n, ratio * n))
    wr = (0, 10) if rng.random() < 0.5 else (1, 10 ** 6)
    return generate("random-scc", n, m, wr, seed=int(rng.integers(2 ** 31)))


def _rt(D):
    return D + D.T


def _triples(rng, n, count):
    return (rng.integers(0, n, count), rng.integers(0, n, count), rng.integers(0, n, count))


def lemma_harness(lemma: str, trials: int = 100_000, seed: int = 0, k: int = 2,
                  batch: int = 20_000, max_graphs: int = 10_000) -> LemmaReport:
    """Sample random tuples until ``trials`` satisfy the lemma's premise; count failed conclusions.

    key-obs / k-approx: ``k d(v,r) + d(r,u) <= k d(v,u) + (k-1) d(u,r)`` implies
    ``d(r<->u) <= k d(u<->v)`` (key-obs is k = 2).
    two-layer: for a second-stage sample r2 and u != v, ``2d(r2,v) + d(u,r2) <=
    2d(u,v) + d(r2,u)`` implies the estimate after the second phase is at most
    ``4 d(u<->v)``.
    filter: v in B4out(r2) and u outside B2out(r2) imply some r1 in R1out(r2)
    with ``d(v<->r1) <= 4 d(v<->u)``.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}")
    if lemma == "key-obs":
        k = 2
    rng = np.random.default_rng(seed)
    per_graph = max(1, trials // 40)  # spread the sample over many graphs
    hits = viol = graphs = 0
    examples = []
    while hits < trials and graphs < max_graphs:
        g = harness_graph(rng)
        graphs += 1
        D = distance_matrix(g)
        n = g.n
        if lemma in ("key-obs", "k-approx"):
            u, v, r = _triples(rng, n, batch)
            prem = k * D[v, r] + D[r, u] <= k * D[v, u] + (k - 1) * D[u, r]
            concl = D[r, u] + D[u, r] <= k * (D[u, v] + D[v, u])
        elif lemma == "two-layer":
            prem, concl, u, v = _two_layer(g, D, rng, batch)
        else:
            prem, concl, u, v = _filter(g, D, rng, batch)
        take = np.flatnonzero(prem)[: min(per_graph, trials - hits)]
        hits += len(take)
        bad = take[~concl[take]]
        viol += len(bad)
        for i in bad[: 5 - len(examples)]:
            examples.append({"graph_index": graphs - 1, "u": int(u[i]), "v": int(v[i])})
    return LemmaReport(lemma, hits, viol, graphs, k if lemma != "filter" else 4, examples)


def _stressed_run(g: WeightedDigraph, rng: np.random.Generator) -> GirthRun:
    cfg = GirthConfig(c1=1, c2=1, regularize=False)
    run = GirthRun(g, np.arange(g.n, dtype=np.int64), np.zeros(g.m, bool), cfg,
                   np.random.default_rng(int(rng.integers(2 ** 31))))
    phase1(run)
    compute_eliminators_1(run, OUT)
    compute_eliminators_1(run, IN)
    return run


def _two_layer(g, D, rng, batch):
    run = _stressed_run(g, rng)
    phase2(run)
    g2 = run.best.value
    u = rng.integers(0, g.n, batch)
    v = rng.integers(0, g.n, batch)
    r2 = run.s2_vert[rng.integers(0, len(run.s2_vert), batch)]
    prem = (u != v) & (2 * D[r2, v] + D[u, r2] <= 2 * D[u, v] + D[r2, u])
    concl = g2 <= 4 * (D[u, v] + D[v, u])
    return prem, concl, u, v


def _filter(g, D, rng, batch):
    run = _stressed_run(g, rng)
    RT = _rt(D)
    prem_all, concl_all, us, vs = [], [], [], []
    per = max(1, batch // 8)
    for r2 in rng.integers(0, g.n, 8).tolist():
        R = run.s1_vert[run.R1out[r2, :run.R1out_cnt[r2]]]
        b4 = np.zeros(g.n, bool)
        b4[list(definition_ball4_out(D, r2, R))] = True
        b2 = np.zeros(g.n, bool)
        b2[list(definition_ball2_out(D, r2, R))] = True
        u = rng.integers(0, g.n, per)
        v = rng.integers(0, g.n, per)
        prem = b4[v] & ~b2[u]
        if len(R):
            best = RT[v[:, None], R[None, :]].min(axis=1)
        else:
            best = np.full(per, INF, np.int64)
        concl = best <= 4 * RT[v, u]
        prem_all.append(prem)
        concl_all.append(concl)
        us.append(u)
        vs.append(v)
    return (np.concatenate(prem_all), np.concatenate(concl_all),
            np.concatenate(us), np.concatenate(vs))


# -- size regression -----------------------------------------------------------------


@dataclass
class RegressionResult:
    builder: str
    sizes: list[int]
    mean_size: list[float]
    slope: float
    constant: float
    per_seed: list[list[int]]
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"builder": self.builder, "n": self.sizes, "mean_size": self.mean_size,
                "slope": self.slope, "constant": self.constant, "extra": self.extra}


def dense_edge_count(n: int) -> int:
    """Edge count used for the "dense" regression inputs: about n^2 / 8."""
    return min(n * (n - 1), max(n, n * n // 8))


def size_regression(builder: str, sizes, seeds: int = 30, k: int = 3,
                    edges=dense_edge_count, weight_range=(1, 100), seed: int = 0) -> RegressionResult:
    """Least-squares fit of log|H| against log n over ``seeds`` random inputs per size.

    ``builder`` is ``spanner3`` or ``emulator``.
    """
    sizes = [int(s) for s in sizes]
    if len(set(sizes)) < 2:
        raise ValueError("need at least two distinct sizes")
    if builder not in ("spanner3", "emulator"):
        raise ValueError(f"unknown builder {builder!r}")
    per_seed, residual = [], []
    for n in sizes:
        row, res_row = [], []
        for s in range(seeds):
            gseed = seed * 1_000_003 + n * 1009 + s
            g = generate("random-scc", n, edges(n), weight_range, seed=gseed)
            if builder == "spanner3":
                r = build_3_spanner(g, seed=gseed)
                row.append(r.size)
                res_row.append(r.stats["residual_edges"])
            else:
                r = build_emulator(g, k=k, seed=gseed)
                row.append(r.size)
                res_row.append(r.stats["residual_edges"])
        per_seed.append(row)
        residual.append(float(np.mean(res_row)))
    mean = [float(np.mean(r)) for r in per_seed]
    x = np.log(sizes)
    y = np.log(mean)
    slope, intercept = np.polyfit(x, y, 1)
    return RegressionResult(builder, sizes, mean, float(slope), float(math.exp(intercept)),
                            per_seed, {"mean_residual": residual, "k": k if builder == "emulator" else None})
