from fractions import Fraction

import pytest

from conftest import cycle_graph
from rtkit.emulator import build_emulator
from rtkit.generators import generate
from rtkit.girth4 import GirthEstimate, approx_girth_4
from rtkit.graph import WeightedDigraph
from rtkit.spanner import build_3_spanner
from rtkit.sssp import distance_matrix
from rtkit.verify import (
    audit_girth,
    audit_spanner,
    definition_ball2_out,
    definition_ball4_out,
    lemma_harness,
    size_regression,
)


def two_cycle():
    return WeightedDigraph.from_edges(2, [(0, 1, 2), (1, 0, 3)])


def star_of_cycles(arms=4, length=3):
    """Cycles of ``length`` vertices that all pass through vertex 0; arm j has weight j+1 per edge."""
    edges, nxt = [], 1
    for j in range(arms):
        ring = [0] + list(range(nxt, nxt + length - 1))
        nxt += length - 1
        edges += [(a, b, j + 1) for a, b in zip(ring, ring[1:] + ring[:1])]
    return WeightedDigraph.from_edges(nxt, edges)


# -- stretch audits ------------------------------------------------------------------------


@pytest.mark.parametrize("g", [cycle_graph(6, 2), two_cycle(), star_of_cycles()])
def test_identity_has_stretch_one(g):
    rep = audit_spanner(g, g, 1)
    assert rep.passed and rep.max_stretch == 1 and rep.subgraph_ok is None


def test_missing_cycle_edge_reported():
    g = cycle_graph(6)
    h = g.edge_subgraph([i for i in range(g.m) if i != 2])
    rep = audit_spanner(g, h, 3, require_subgraph=True)
    assert not rep.passed
    v = rep.violation
    assert v["kind"] == "unreachable" and v["d_h"] is None and v["d_g"] == 6
    assert v["g_paths"]["u_to_v"] is not None


def test_star_of_cycles_hand_checked():
    g = star_of_cycles(arms=2, length=3)  # arm 0 weighs 3 in total, arm 1 weighs 6
    # keep arm 0 plus only the first edge of arm 1: arm 1 vertices lose their way back
    h = g.edge_subgraph([g.edge_id(0, 1), g.edge_id(1, 2), g.edge_id(2, 0), g.edge_id(0, 3)])
    rep = audit_spanner(g, h, 3)
    assert not rep.passed and rep.violation["kind"] == "unreachable"
    # an emulator-style H may shortcut arm 1 with one heavier edge pair, stretch stays exact
    h2 = WeightedDigraph.from_edges(5, list(h.edges()) + [(3, 4, 2), (4, 0, 2)])
    rep = audit_spanner(g, h2, 1)
    assert rep.passed and rep.max_stretch == 1


def test_stretch_ratio_is_exact_fraction():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (0, 2, 2), (2, 0, 1)])
    h = g.edge_subgraph([g.edge_id(0, 1), g.edge_id(1, 0), g.edge_id(1, 2), g.edge_id(2, 1)])
    rep = audit_spanner(g, h, 3)
    # d_G(0<->2) = 2 + 1 = 3, while H must go through vertex 1 both ways: 2 + 2
    assert rep.passed and rep.max_stretch == Fraction(4, 3) and rep.argmax == (0, 2)
    assert not audit_spanner(g, h, 1).passed


def test_lower_bound_violation_detected():
    g = cycle_graph(4, 5)
    h = WeightedDigraph.from_edges(4, list(g.edges()) + [(0, 2, 1), (2, 0, 1)])
    rep = audit_spanner(g, h, 3)
    assert not rep.passed and rep.violation["kind"] == "lower"


def test_zero_pairs_need_zero():
    g = WeightedDigraph.from_edges(3, [(0, 1, 0), (1, 0, 0), (1, 2, 1), (2, 1, 1)])
    assert audit_spanner(g, g, 3).zero_pairs == 1
    h = WeightedDigraph.from_edges(3, [(0, 1, 1), (1, 0, 0), (1, 2, 1), (2, 1, 1)])
    assert not audit_spanner(g, h, 3).passed


def test_algorithm_outputs_pass():
    for seed in range(50):
        g = generate("random-scc", 100, 500, (0, 60), seed=seed)
        assert audit_spanner(g, build_3_spanner(g, seed=seed), 3).passed
    g = generate("random-scc", 80, 400, (0, 60), seed=1)
    assert audit_spanner(g, build_emulator(g, 3, seed=1), 5).passed


def test_report_serialises():
    g = generate("random-scc", 30, 90, (1, 5), seed=1)
    d = audit_spanner(g, build_3_spanner(g), 3).as_dict()
    assert d["passed"] and isinstance(d["max_stretch"], str)


# -- girth audits ------------------------------------------------------------------------


def test_girth_audit_triangle():
    g = cycle_graph(3)
    rep = audit_girth(g, approx_girth_4(g))
    assert rep.passed and rep.exact == rep.estimate == 3


def test_girth_audit_tampered():
    g = cycle_graph(3)
    est = approx_girth_4(g)
    assert not audit_girth(g, GirthEstimate(2, est.witness, est.phase)).passed
    assert not audit_girth(g, GirthEstimate(13, est.witness, est.phase)).passed
    assert not audit_girth(g, 3, [0, 2, 1]).passed  # reversed orientation is not a cycle of g


def test_girth_audit_batch():
    for seed in range(100):
        g = generate("random-scc", 40, 120, (0, 20), seed=seed)
        assert audit_girth(g, approx_girth_4(g, seed=seed)).passed


def test_girth_audit_acyclic():
    g = generate("layered", 10, 15, seed=0)
    assert audit_girth(g, approx_girth_4(g)).passed
    assert not audit_girth(g, 5, [0, 1]).passed


# -- lemma harnesses ----------------------------------------------------------------------


@pytest.mark.parametrize("lemma", ["key-obs", "k-approx", "two-layer", "filter"])
def test_lemmas_hold(lemma):
    rep = lemma_harness(lemma, trials=20_000, seed=5)
    assert rep.premise_hits == 20_000 and rep.violations == 0


def test_k2_matches_key_observation():
    a = lemma_harness("key-obs", trials=5000, seed=9)
    b = lemma_harness("k-approx", trials=5000, seed=9, k=2)
    assert a.as_dict() | {"lemma": None} == b.as_dict() | {"lemma": None}


def test_unknown_lemma():
    with pytest.raises(ValueError):
        lemma_harness("nope", 10)


def test_filter_gadget():
    r2, v, u, r1 = 0, 1, 2, 3
    g = WeightedDigraph.from_edges(4, [(r2, r1, 5), (r1, r2, 5), (r2, v, 1), (v, r2, 1),
                                       (r1, u, 1), (u, r1, 1)])
    D = distance_matrix(g)
    R = [r1]
    assert v in definition_ball4_out(D, r2, R)
    assert u not in definition_ball2_out(D, r2, R)
    rt = D + D.T
    assert any(rt[v, r] <= 4 * rt[v, u] for r in R)


# -- size regression ---------------------------------------------------------------------


def test_regression_needs_two_sizes():
    with pytest.raises(ValueError, match="two distinct sizes"):
        size_regression("spanner3", [256], seeds=1)
    with pytest.raises(ValueError):
        size_regression("tree", [64, 128], seeds=1)


def test_regression_small():
    r = size_regression("spanner3", [64, 128, 256], seeds=3)
    assert len(r.per_seed) == 3 and all(len(x) == 3 for x in r.per_seed)
    assert 1.0 < r.slope < 2.0 and r.constant > 0
    e = size_regression("emulator", [64, 128], seeds=2, k=3)
    assert e.extra["k"] == 3 and len(e.extra["mean_residual"]) == 2
