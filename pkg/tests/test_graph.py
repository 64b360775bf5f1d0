import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import (
    cycle_graph,
    digraphs,
    floyd_warshall,
    random_graph,
    reachability,
    simple_cycles,
)
from rtkit.generators import generate
from rtkit.graph import (
    INF,
    GraphError,
    ParseError,
    WeightedDigraph,
    parse_graph,
    read_graph,
    sat_add,
    scc_decompose,
    serialize_graph,
    write_graph,
)
from rtkit.regularize import regularize
from rtkit.sssp import exact_roundtrip_apsp


# -- parsing -----------------------------------------------------------------------------


def test_parse_triangle():
    g = parse_graph("3 3\n0 1 1\n1 2 1\n2 0 1")
    assert (g.n, g.m) == (3, 3)
    assert list(g.edges()) == [(0, 1, 1), (1, 2, 1), (2, 0, 1)]


def test_parse_self_loop_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_graph("2 1\n0 0 5")
    assert exc.value.lineno == 2
    assert "self-loop" in str(exc.value)


def test_parse_parallel_edges_keep_min_weight():
    g = parse_graph("2 2\n0 1 7\n0 1 3")
    assert list(g.edges()) == [(0, 1, 3)]


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("x 1\n", 1),
        ("2 1\n0 1\n", 2),
        ("2 1\n0 2 1\n", 2),
        ("2 1\n0 1 -4\n", 2),
        ("2 2\n0 1 1\n", 2),
        ("2 1\n0 1 1\n1 0 1\n", 3),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_graph(text)
    assert exc.value.lineno == line


def test_bytes_and_blank_lines_accepted():
    g = parse_graph(b"\n2 1\n\n1 0 4\n")
    assert list(g.edges()) == [(1, 0, 4)]


@given(digraphs(max_n=12, max_w=1000))
def test_parse_serialize_roundtrip(g):
    assert parse_graph(serialize_graph(g)) == g


def test_file_roundtrip(tmp_path):
    g = generate("random-gnm", 30, 100, (0, 50), seed=3)
    write_graph(g, tmp_path / "g.graph")
    assert read_graph(tmp_path / "g.graph") == g


# -- representation ------------------------------------------------------------------------


@given(digraphs(max_n=12))
def test_in_adjacency_is_transpose_of_out(g):
    out_entries = sorted((u, v, w) for u in range(g.n) for v, w in g.out_adj(u))
    in_entries = sorted((u, v, w) for v in range(g.n) for u, w in g.in_adj(v))
    assert out_entries == in_entries == sorted(g.edges())


def test_constructor_rejects_bad_input():
    with pytest.raises(GraphError):
        WeightedDigraph(2, [0], [0], [1])
    with pytest.raises(GraphError):
        WeightedDigraph(2, [0], [1], [-1])
    with pytest.raises(GraphError):
        WeightedDigraph(2, [0], [2], [1])
    with pytest.raises(GraphError):
        WeightedDigraph(2, [0], [1], [1 << 60])


def test_weight_lookup_and_subgraphs():
    g = WeightedDigraph.from_edges(4, [(0, 1, 5), (1, 2, 1), (2, 0, 2), (2, 3, 9)])
    assert g.weight(0, 1) == 5 and g.weight(1, 0) is None
    sub, verts = g.induced_subgraph([0, 1, 2])
    assert verts.tolist() == [0, 1, 2] and sub.m == 3
    h = g.edge_subgraph([g.edge_id(0, 1), g.edge_id(1, 2)])
    assert h.is_subgraph_of(g) and not g.is_subgraph_of(h)
    assert g.transpose().weight(1, 0) == 5


def test_saturating_add():
    assert sat_add(INF, 5) == INF
    assert sat_add(3, 4) == 7
    assert sat_add(INF - 1, 10) == INF


# -- strongly connected components ------------------------------------------------------------


def test_scc_triangle_and_single_edge():
    assert scc_decompose(cycle_graph(3)).count == 1
    d = scc_decompose(WeightedDigraph.from_edges(2, [(0, 1, 1)]))
    assert d.count == 2 and d.nontrivial() == []


def test_scc_matches_transitive_closure_on_random_graph(rng):
    g = random_graph(rng, 50, 90)
    r = reachability(g)
    same = r & r.T
    d = scc_decompose(g)
    assert ((d.comp[:, None] == d.comp[None, :]) == same).all()


@given(digraphs(max_n=10))
def test_scc_property(g):
    r = reachability(g)
    d = scc_decompose(g)
    assert ((d.comp[:, None] == d.comp[None, :]) == (r & r.T)).all()
    assert sum(len(m) for m in d.members) == g.n
    # numbered by smallest member
    firsts = [int(min(m)) for m in d.members]
    assert firsts == sorted(firsts)


# -- generators -------------------------------------------------------------------------------


def test_generate_cycle():
    g = generate("cycle", 4, weight_range=(1, 1))
    assert list(g.edges()) == [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]


def test_generate_rejects_too_many_edges():
    with pytest.raises(GraphError, match="90 possible edges"):
        generate("random-gnm", 10, 200)


def test_generate_is_deterministic():
    assert generate("random-gnm", 100, 500, (1, 9), seed=7) == generate("random-gnm", 100, 500, (1, 9), seed=7)
    assert generate("random-gnm", 100, 500, (1, 9), seed=7) != generate("random-gnm", 100, 500, (1, 9), seed=8)


@pytest.mark.parametrize("n, m", [(5, 5), (40, 200), (30, 870)])
def test_random_scc_is_strongly_connected(n, m):
    g = generate("random-scc", n, m, (0, 5), seed=1)
    assert g.m == m and scc_decompose(g).count == 1


def test_layered_is_acyclic_and_complete_is_full():
    assert next(simple_cycles(generate("layered", 20, 60, seed=2)), None) is None
    assert generate("complete", 6).m == 30


# -- regularization ---------------------------------------------------------------------------


def _star(leaves=10):
    n = 2 * leaves + 1
    edges = [(0, i, i) for i in range(1, leaves + 1)]
    edges += [(leaves + i, 0, 2 * i) for i in range(1, leaves + 1)]
    edges += [(i, leaves + i, 1) for i in range(1, leaves + 1)]
    return WeightedDigraph.from_edges(n, edges)


def _check_roundtrips_preserved(g, reg):
    rg = exact_roundtrip_apsp(g)
    rh = exact_roundtrip_apsp(reg.graph)
    assert (rh[: g.n, : g.n] == rg).all()


def test_regularize_star_splits_center():
    g = _star()
    reg = regularize(g)
    h = reg.graph
    external = np.bincount(h.src[~reg.gadget], minlength=h.n) + np.bincount(h.dst[~reg.gadget], minlength=h.n)
    assert (reg.vertex_origin == 0).sum() > 1
    assert external.max() <= reg.degree_cap
    _check_roundtrips_preserved(g, reg)


def test_regularize_leaves_regular_graph_alone():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (2, 0, 3)])
    reg = regularize(g)
    assert reg.graph == g and not reg.gadget.any()


@given(digraphs(max_n=12, max_w=6))
def test_regularize_invariants(g):
    reg = regularize(g)
    h = reg.graph
    deg = np.bincount(h.src, minlength=h.n) + np.bincount(h.dst, minlength=h.n)
    assert deg.max(initial=0) <= reg.degree_cap + 2
    # gadget edges are exactly the zero-weight edges between copies of one vertex
    same = reg.vertex_origin[h.src] == reg.vertex_origin[h.dst]
    assert (reg.gadget == same).all() and (h.wt[reg.gadget] == 0).all()
    _check_roundtrips_preserved(g, reg)


@given(digraphs(max_n=7, max_w=6))
def test_regularized_cycles_map_to_equal_weight_closed_walks(g):
    reg = regularize(g)
    h = reg.graph
    if h.n > 12:
        return
    d = floyd_warshall(g)
    for cyc in simple_cycles(h):
        pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
        if all(reg.gadget[h.edge_id(a, b)] for a, b in pairs):
            continue
        w = sum(h.weight(a, b) for a, b in pairs)
        walk = reg.origin_cycle(cyc)
        # consecutive origins are joined by original edges of the same total weight
        assert sum(g.weight(a, b) for a, b in zip(walk, walk[1:] + walk[:1])) == w
        assert w >= min(d[u][v] + d[v][u] for u in range(g.n) for v in range(g.n) if u != v)


@given(st.integers(0, 5))
def test_regularize_empty_and_edgeless(n):
    reg = regularize(WeightedDigraph(n, [], [], []))
    assert reg.graph.n == n and reg.graph.m == 0
