import pytest

from antnet.sp_graph import FlatGraph, parse_sp
from antnet.triangle import FOOD, N1, N2, assemble, from_config, line_triangle


def test_plain_triangle():
    t = assemble(parse_sp("e"), parse_sp("e"), parse_sp("e"))
    assert len(t.graph.vertices) == 3 and len(t.graph.edges) == 3
    assert t.lengths == (1, 1, 1)


def test_112_example():
    t = assemble(parse_sp("e"), parse_sp("e"), parse_sp("series(e,e)"))
    assert len(t.graph.vertices) == 4 and len(t.graph.edges) == 4
    assert t.lengths == (1, 1, 2)


@pytest.mark.parametrize("lengths,n_edges", [((1, 1, 1), 3), ((2, 2, 3), 7), ((2, 4, 3), 9)])
def test_line_triangle_sizes(lengths, n_edges):
    t = line_triangle(*lengths)
    assert t.lengths == lengths
    assert len(t.graph.edges) == n_edges
    assert len(t.graph.vertices) == 3 + sum(l - 1 for l in lengths)


def test_line_triangle_rejects_bad_lengths():
    with pytest.raises(ValueError):
        line_triangle(0, 1, 1)
    with pytest.raises(ValueError):
        line_triangle(1.5, 1, 1)


def test_partition_and_orientation():
    t = assemble(parse_sp("par(e,series(e,e))"), parse_sp("series(e,e)"), parse_sp("par(e,e)"))
    parts = [set(p) for p in t.parts]
    assert set().union(*parts) == {e.id for e in t.graph.edges}
    assert sum(len(p) for p in parts) == len(t.graph.edges)
    for i, (s, f) in enumerate(((N1, FOOD), (N2, FOOD), (N1, N2))):
        g = t.component_graph(i)
        assert (g.source, g.sink) == (s, f)
    assert t.graph.marks == {"N1": N1, "N2": N2, "F": FOOD}


def _simple_paths(graph, s, t):
    adj = graph.adjacency()
    out = []

    def dfs(x, seen, edges):
        if x == t:
            out.append(tuple(edges))
            return
        for y, e in adj[x]:
            if y not in seen:
                dfs(y, seen | {y}, edges + [e])

    dfs(s, {s}, [])
    return out


@pytest.mark.parametrize("exprs", [
    ("e", "e", "e"),
    ("series(e,e)", "par(e,e)", "e"),
    ("par(e,series(e,e))", "e", "series(e,par(e,e))"),
])
def test_four_path_categories(exprs):
    t = assemble(*(parse_sp(x) for x in exprs))
    comp = t.component_of()
    for nest, own, other in ((N1, 0, 1), (N2, 1, 0)):
        for path in _simple_paths(t.graph, nest, FOOD):
            used = {comp[e] for e in path}
            assert used in ({own}, {2, other})


def test_removing_g3_leaves_only_route_through_food():
    t = line_triangle(2, 3, 2)
    g3 = set(t.parts[2])
    keep = tuple(e for e in t.graph.edges if e.id not in g3)
    sub = FlatGraph(t.graph.vertices, keep, N1, N2)
    ends = t.graph.edge_by_id
    paths = _simple_paths(sub, N1, N2)
    assert paths
    for path in paths:
        assert any(FOOD in (ends[e].u, ends[e].v) for e in path)


def test_from_config():
    assert from_config({"lengths": [2, 4, 3]}).lengths == (2, 4, 3)
    t = from_config({"g1": "e", "g2": "series(e,e)", "g3": "e"})
    assert t.lengths == (1, 2, 1)
    with pytest.raises(ValueError):
        from_config({"g1": "e"})
    with pytest.raises(ValueError):
        from_config({"lengths": [1, 2]})
