import random
from fractions import Fraction

import pytest

from antnet.exact import SingularSystem
from antnet.oracle import (PathDistribution, StateSpaceTooLarge, exact_hit_before,
                           exact_le_distribution, excursion_le_distribution, random_weighted_sp,
                           tv_distance)
from antnet.sp_graph import Edge, FlatGraph, effective_conductance, flatten, line, parse_sp
from antnet.triangle import FOOD, N1, N2, assemble
from antnet.walk import WalkEngine


def test_parallel_pair():
    g = flatten(parse_sp("par(e,e)"))
    d = exact_le_distribution(g, {0: 2, 1: 1}, 0, 1)
    assert d.probs == {(0,): Fraction(2, 3), (1,): Fraction(1, 3)}
    assert excursion_le_distribution(g, {0: 2, 1: 1}, 0, 1).probs == d.probs


def test_line_two_edges():
    d = exact_le_distribution(flatten(line(2)), None, 0, 1)
    assert d.probs == {(0, 1): 1}


def test_monte_carlo_agreement():
    g = flatten(parse_sp("par(e,series(e,e))"))
    d = exact_le_distribution(g, None, g.source, g.sink)
    q = d.probs[(0,)]
    assert q == Fraction(2, 3)
    eng = WalkEngine(g)
    rng = random.Random(123)
    n = 1_000_000
    hits = 0
    for _ in range(n):
        path, _ = eng.loop_erased(g.source, g.sink, rng)
        hits += path == [0]
    se = (float(q) * (1 - float(q)) / n) ** 0.5
    assert abs(hits / n - float(q)) < 4 * se


def test_distributions_sum_to_one_and_paths_are_simple():
    rng = random.Random(4)
    for _ in range(30):
        _, g, w = random_weighted_sp(rng)
        d = exact_le_distribution(g, w, g.source, g.sink)
        assert d.total() == 1
        ends = g.edge_by_id
        for path in d.probs:
            x, seen = g.source, {g.source}
            for e in path:
                x = ends[e].other(x)
                assert x not in seen
                seen.add(x)
            assert x == g.sink


@pytest.mark.parametrize("seed", range(3))
def test_reversal_and_excursion_identities(seed):
    rng = random.Random(seed)
    for _ in range(10):
        _, g, w = random_weighted_sp(rng)
        fwd = exact_le_distribution(g, w, g.source, g.sink)
        back = exact_le_distribution(g, w, g.sink, g.source)
        assert tv_distance(fwd, back, reverse=True) == 0
        assert tv_distance(fwd, excursion_le_distribution(g, w, g.source, g.sink)) == 0


def test_pendant_loop_at_start():
    # start 0, pendant vertex 2, two routes to 1
    edges = (Edge(0, 0, 2), Edge(1, 0, 1), Edge(2, 0, 3), Edge(3, 3, 1))
    g = FlatGraph((0, 1, 2, 3), edges, 0, 1)
    w = {0: 5, 1: 1, 2: 2, 3: 1}
    a = exact_le_distribution(g, w, 0, 1)
    b = excursion_le_distribution(g, w, 0, 1)
    assert a.probs == b.probs
    assert all(0 not in p for p in a.probs)


def test_hit_before_conductance_ratio():
    rng = random.Random(9)
    for _ in range(20):
        g1, g3 = (random_weighted_sp(rng, max_vertices=5)[0] for _ in range(2))
        t = assemble(g1, parse_sp("e"), g3)
        w = {e.id: rng.randint(1, 6) for e in t.graph.edges}
        c1 = effective_conductance(t.global_expr(0), w)
        c3 = effective_conductance(t.global_expr(2), w)
        assert exact_hit_before(t.graph, w, N1, FOOD, N2) == c1 / (c1 + c3)


def test_hit_before_examples():
    # two single edges from 0 ending at different vertices
    g = FlatGraph((0, 1, 2), (Edge(0, 0, 1), Edge(1, 0, 2)), 0, 1)
    assert exact_hit_before(g, {0: 2, 1: 1}, 0, 1, 2) == Fraction(2, 3)
    sym = FlatGraph((0, 1, 2, 3), (Edge(0, 0, 3), Edge(1, 3, 1), Edge(2, 3, 2)), 0, 1)
    assert exact_hit_before(sym, None, 0, 1, 2) == Fraction(1, 2)


def test_hit_before_errors():
    g = FlatGraph((0, 1, 2, 3), (Edge(0, 0, 3), Edge(1, 1, 2)), 0, 1)
    with pytest.raises(ValueError):
        exact_hit_before(g, None, 0, 1, 2)
    with pytest.raises(ValueError):
        exact_hit_before(g, None, 0, 1, 1)


def test_float_weights_fall_back():
    g = flatten(parse_sp("par(e,series(e,e))"))
    d = exact_le_distribution(g, {0: 1.5, 1: 0.5, 2: 2.0}, 0, 1)
    assert not d.exact
    assert abs(d.total() - 1) < 1e-12


def test_caps():
    g = flatten(line(9))
    with pytest.raises(StateSpaceTooLarge):
        exact_le_distribution(g, None, 0, 1)
    g = flatten(parse_sp("par(series(e,e),par(series(e,e),series(e,e)))"))
    with pytest.raises(StateSpaceTooLarge):
        exact_le_distribution(g, None, 0, 1, max_states=2)


def test_unreachable_absorb():
    g = FlatGraph((0, 1, 2), (Edge(0, 0, 2), Edge(1, 2, 0)), 0, 1)
    with pytest.raises(SingularSystem):
        exact_le_distribution(g, None, 0, 1)


def test_tv_distance():
    a = PathDistribution(0, 1, {(0,): Fraction(1, 2), (1,): Fraction(1, 2)})
    b = PathDistribution(0, 1, {(2,): Fraction(1)})
    assert tv_distance(a, a) == 0
    assert tv_distance(a, b) == 1


def test_json_output():
    g = flatten(parse_sp("par(e,e)"))
    text = exact_le_distribution(g, {0: 2, 1: 1}, 0, 1).to_json()
    assert text == '[{"path": [0], "prob": "2/3"}, {"path": [1], "prob": "1/3"}]'
