#!/usr/bin/env python3
"""
Exact coloring tests
Distance graphs, clique search, k-colorability, chromatic number and CNF export
"""

import io

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from hypchroma.bounds import interval_clique_points
from hypchroma.chromasolve import (
    ColoringResult,
    Decision,
    SolveStatus,
    build_distance_graph,
    chromatic_number,
    clause_count,
    export_dimacs_cnf,
    greedy_dsatur,
    k_colorable,
    make_graph,
    max_clique,
    read_edge_list,
    solve_cnf_with_pysat,
    verify_coloring,
    write_edge_list,
)
from hypchroma.errors import ParameterError
from hypchroma.treegeom import build_ball, color_even, moser_spindle
from tests.conftest import brute_force_chromatic


def cycle(n):
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")


def clique_number(g):
    return max((len(c) for c in nx.find_cliques(g.to_networkx())), default=0)


@st.composite
def graphs(draw, max_vertices=9):
    n = draw(st.integers(0, max_vertices))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return make_graph(n, chosen)


@pytest.fixture(scope="module")
def t3_d8():
    ball = build_ball(3, 8, 12)
    return ball, build_distance_graph(ball, 8)


def test_make_graph_normalizes_edges():
    g = make_graph(3, [(1, 0), (0, 1), (2, 2), (2, 1)])
    assert g.edges == [(0, 1), (1, 2)]
    with pytest.raises(ParameterError):
        make_graph(2, [(0, 2)])


def test_tree_distance_graph_forbidden_forms():
    ball = build_ball(3, 2, 4)
    single = build_distance_graph(ball, 2)
    assert single.vertex_count == 10
    assert single.labels == ball.ball_vertices
    pair = build_distance_graph(ball, (1, 2))
    listed = build_distance_graph(ball, [1, 2])
    assert pair.edges == listed.edges
    assert len(pair.edges) == len(single.edges) + 9
    with pytest.raises(ParameterError):
        build_distance_graph(ball, 0)
    with pytest.raises(ParameterError):
        build_distance_graph(ball, 2.5)


def test_t3_ball_eight_distance_graph(t3_d8):
    ball, g = t3_d8
    assert g.vertex_count == 766
    tree = nx.Graph(ball.edges())
    inside = set(ball.ball_vertices)
    expected = 0
    for v in ball.ball_vertices:
        lengths = nx.single_source_shortest_path_length(tree, v, cutoff=8)
        expected += sum(1 for u, dist in lengths.items() if dist == 8 and u in inside)
    assert len(g.edges) == expected // 2


def test_point_list_clique_graph():
    witness = interval_clique_points(6.0, 2.0)
    g = build_distance_graph(witness.points, (6.0, 12.0))
    assert g.vertex_count == 63
    assert len(g.edges) == 63 * 62 // 2
    assert max_clique(g).size == 63


def test_max_clique_examples():
    triangle = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert max_clique(triangle).size == 3
    assert max_clique(make_graph(0, [])).size == 0
    assert max_clique(make_graph(4, [])).size == 1
    assert max_clique(build_distance_graph(build_ball(3, 2, 4), 2)).size == 3
    result = max_clique(build_distance_graph(build_ball(4, 2, 6), 4))
    assert result.size == 4
    assert result.status == SolveStatus.SOLVED


@settings(max_examples=150)
@given(graphs(max_vertices=12))
def test_max_clique_matches_networkx(g):
    result = max_clique(g)
    assert result.size == clique_number(g)
    for i, u in enumerate(result.witness):
        for v in result.witness[i + 1:]:
            assert v in g.adjacency[u]


@settings(max_examples=150)
@given(graphs())
def test_chromatic_number_matches_brute_force(g):
    result = chromatic_number(g)
    assert result.status == SolveStatus.SOLVED
    assert result.exact == brute_force_chromatic(g.vertex_count, g.edges)
    assert verify_coloring(g, result.certificate)
    assert len(set(result.certificate)) == result.exact
    assert max_clique(g).size <= result.exact


@settings(max_examples=100)
@given(st.sampled_from([1, 2, 3, 4, (1, 2), (2, 4), (2, 3)]), st.data())
def test_tree_ball_subgraphs_match_brute_force(forbidden, data):
    g = build_distance_graph(build_ball(3, 3, 5), forbidden)
    chosen = data.draw(st.lists(st.sampled_from(range(g.vertex_count)), min_size=1, max_size=12, unique=True))
    sub = g.subgraph(chosen)
    assert chromatic_number(sub).exact == brute_force_chromatic(sub.vertex_count, sub.edges)


@pytest.mark.parametrize("radius", [3, 4, 5])
def test_distance_two_graph_needs_three_colors(radius):
    g = build_distance_graph(build_ball(3, radius, radius + 2), 2)
    result = chromatic_number(g)
    assert result.exact == 3
    assert len(result.clique) == 3


@pytest.mark.parametrize("q, colors", [(3, 4), (4, 5)])
def test_spindle_needs_one_more_color(q, colors):
    gadget = moser_spindle(build_ball(q, 4, 8), 4)
    index = {v: i for i, v in enumerate(gadget.vertices)}
    g = make_graph(gadget.vertex_count, [(index[u], index[v]) for u, v in gadget.pairs])
    assert max_clique(g).size == q
    assert chromatic_number(g).exact == colors
    assert brute_force_chromatic(g.vertex_count, g.edges) == colors


def test_small_chromatic_examples():
    assert chromatic_number(make_graph(2, [(0, 1)])).exact == 2
    empty = chromatic_number(make_graph(0, []))
    assert empty.exact == 0
    assert empty.certificate == []
    isolated = chromatic_number(make_graph(3, [(0, 1)]))
    assert isolated.exact == 2
    assert chromatic_number(cycle(7)).exact == 3


def test_chromatic_number_is_deterministic():
    g = build_distance_graph(build_ball(3, 3, 5), (2, 3))
    assert chromatic_number(g) == chromatic_number(g)


def test_greedy_dsatur_is_proper():
    g = build_distance_graph(build_ball(3, 4, 6), 4)
    assert verify_coloring(g, greedy_dsatur(g))


def test_k_colorable_decisions():
    assert k_colorable(make_graph(0, []), 1).status == Decision.SAT
    triangle = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert k_colorable(triangle, 2).status == Decision.UNSAT
    three = k_colorable(triangle, 3)
    assert three.status == Decision.SAT
    assert verify_coloring(triangle, three.certificate)
    assert k_colorable(cycle(5), 2).status == Decision.UNSAT
    with pytest.raises(ParameterError):
        k_colorable(triangle, 0)


def test_budget_exhaustion_reports_timeout():
    c7 = cycle(7)
    assert k_colorable(c7, 2, budget=1).status == Decision.TIMEOUT
    result = chromatic_number(c7, budget=1)
    assert result.status == SolveStatus.TIMEOUT
    assert (result.lower_bound, result.upper_bound) == (2, 3)
    assert result.exact is None
    assert verify_coloring(c7, result.certificate)


def test_coloring_result_keeps_bounds_consistent():
    with pytest.raises(ValidationError):
        ColoringResult(lower_bound=3, upper_bound=2, status=SolveStatus.TIMEOUT)
    with pytest.raises(ValidationError):
        ColoringResult(lower_bound=2, upper_bound=3, exact=3, status=SolveStatus.SOLVED)


def test_known_coloring_warm_starts_search(t3_d8):
    ball, g = t3_d8
    palette = {}
    hint = [palette.setdefault(color_even(ball, v, 8), len(palette)) for v in g.labels]
    assert len(palette) <= 18
    result = k_colorable(g, 18, hint=hint)
    assert result.status == Decision.SAT
    assert result.nodes == 0
    assert verify_coloring(g, result.certificate)


@pytest.mark.slow
def test_t3_distance_eight_is_not_four_colorable(t3_d8):
    _, g = t3_d8
    assert solve_cnf_with_pysat(g, 4).status == Decision.UNSAT
    assert k_colorable(g, 4, budget=10 ** 10).status == Decision.UNSAT


def test_cnf_header_and_counts():
    triangle = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    buf = io.StringIO()
    summary = export_dimacs_cnf(triangle, 3, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "p cnf 9 21"
    assert (summary.variables, summary.clauses) == (9, 21)
    assert len(lines) == 22
    assert all(line.endswith(" 0") for line in lines[1:])
    assert lines[1] == "1 2 3 0"

    single = io.StringIO()
    export_dimacs_cnf(make_graph(1, []), 1, single)
    assert single.getvalue().splitlines() == ["p cnf 1 1", "1 0"]
    assert clause_count(cycle(5), 3) == 5 * 4 + 5 * 3


def test_pysat_reads_exported_cnf(tmp_path):
    c5 = cycle(5)
    two = tmp_path / "c5_k2.cnf"
    summary = export_dimacs_cnf(c5, 2, two)
    assert summary.destination == str(two)
    assert solve_cnf_with_pysat(c5, 2, cnf_path=two).status == Decision.UNSAT

    three = tmp_path / "c5_k3.cnf"
    export_dimacs_cnf(c5, 3, three)
    result = solve_cnf_with_pysat(c5, 3, cnf_path=three)
    assert result.status == Decision.SAT
    assert verify_coloring(c5, result.certificate)


def test_edge_list_io():
    text = "# distance graph\n0 1\n1 2  # trailing\n\n2 0\n3 1\n"
    g = read_edge_list(io.StringIO(text))
    assert g.vertex_count == 4
    assert g.edges == [(0, 1), (0, 2), (1, 2), (1, 3)]
    out = io.StringIO()
    assert write_edge_list(g, out) == 4
    assert read_edge_list(io.StringIO(out.getvalue())).edges == g.edges
