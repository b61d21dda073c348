import random
from fractions import Fraction

import pytest

from antnet import ants, theory
from antnet.ants import (AntsState, InvariantViolation, geometric_checkpoints, growth_exponents,
                         restriction_times, run, single_nest_run)
from antnet.oracle import exact_le_distribution
from antnet.sp_graph import line, parse_sp
from antnet.triangle import N1, N2, assemble, line_triangle


def test_init():
    s = ants.init(line_triangle(2, 4, 3), 0.3, seed=0)
    assert s.W == [1] * 9 and s.N == [0, 0, 0] and s.n == 0
    with pytest.raises(ValueError):
        ants.init(line_triangle(1, 1, 1), 1.5)


@pytest.mark.parametrize("alpha,nest", [(0.0, 2), (1.0, 1)])
def test_degenerate_alpha(alpha, nest):
    s = ants.init(line_triangle(1, 2, 1), alpha, seed=1)
    for _ in range(200):
        _, rec = ants.step(s)
        assert rec.nest == nest


def test_step_counters_follow_categories():
    s = ants.init(assemble(parse_sp("par(e,series(e,e))"), parse_sp("series(e,e)"), parse_sp("par(e,e)")),
                  0.4, seed=2)
    want = {"G1": (1, 0, 0), "G3+G2": (0, 1, 1), "G2": (0, 1, 0), "G3+G1": (1, 0, 1)}
    seen = set()
    for _ in range(3000):
        before = list(s.N)
        _, rec = ants.step(s)
        delta = tuple(a - b for a, b in zip(s.N, before))
        assert delta == rec.delta == want[rec.category]
        assert s.N[0] + s.N[1] == s.n
        seen.add(rec.category)
        assert max(s.W) <= s.n + 1
    assert seen == set(want)


def test_run_single_checkpoint():
    s = ants.init(line_triangle(1, 1, 1), 0.5, seed=0)
    res = run(s, 1, checkpoints=[1])
    assert len(res.snapshots) == 1
    snap = res.snapshots[0]
    assert snap["N"][0] + snap["N"][1] == 1
    assert set(snap) == {"n", "N", "Nhat", "C", "r", "delta"}


def test_run_matches_step():
    tri = line_triangle(2, 3, 2)
    a = ants.init(tri, 0.3, seed=5)
    for _ in range(500):
        ants.step(a)
    b = ants.init(tri, 0.3, seed=5)
    run(b, 500)
    assert a.W == b.W and a.N == b.N


def test_run_deterministic():
    tri = assemble(parse_sp("series(e,par(e,e))"), parse_sp("series(e,series(e,e))"), parse_sp("e"))
    s1 = run(ants.init(tri, 0.3, seed=9), 2000, with_weights=True).snapshots
    s2 = run(ants.init(tri, 0.3, seed=9), 2000, with_weights=True).snapshots
    assert s1 == s2
    assert [s["n"] for s in s1] == geometric_checkpoints(0, 2000)


def test_run_detects_broken_invariant():
    s = ants.init(line_triangle(1, 1, 1), 0.5, seed=0)
    s.N[0] += 1  # corrupt the counters
    with pytest.raises(InvariantViolation):
        run(s, 5)


def test_line_triangle_conductance_offset():
    # unit initial weights put C_i one path ahead of N_i / l_i
    s = ants.init(line_triangle(2, 4, 3), 0.3, seed=3)
    run(s, 3000)
    C = s.conductances()
    assert C == tuple(Fraction(k + 1, l) for k, l in zip(s.N, (2, 4, 3)))


def test_residual_zero_when_conductances_match_counts():
    s = ants.init(line_triangle(2, 4, 3), 0.3, seed=3)
    run(s, 1000)
    C = tuple(Fraction(k, l) for k, l in zip(s.N, (2, 4, 3)))
    assert ants.residual(s, C) == (0, 0, 0)


def test_residual_undefined_before_all_counters_move():
    s = ants.init(line_triangle(1, 1, 1), 0.5, seed=0)
    assert s.residual() is None and s.delta_hat() is None
    assert s.snapshot()["r"] == [None, None, None]


def test_residual_within_delta_bound():
    tri = assemble(parse_sp("par(e,series(e,e))"), parse_sp("series(e,par(e,e))"),
                   parse_sp("par(series(e,e),e)"))
    s = ants.init(tri, 0.4, seed=11)
    checked = 0
    for cp in geometric_checkpoints(0, 20_000):
        run(s, cp - s.n)
        d = s.delta_hat()
        r = s.residual()
        if d is None or d >= 1:
            continue
        q = theory.p(*(Fraction(k, s.n) for k in s.N),
                     ants._ExactParams(Fraction(2, 5), *tri.lengths))
        for ri, pi in zip(r, q):
            assert ((1 - d) / (1 + d) - 1) * pi <= ri <= ((1 + d) / (1 - d) - 1) * pi
        checked += 1
    assert checked >= 5


def test_floors_on_moderate_run():
    s = ants.init(line_triangle(2, 4, 3), 0.3, seed=0)
    res = run(s, 100_000, checkpoints=[100_000])
    assert res.floors["N1+N3"] >= 0.15 and res.floors["N2+N3"] >= 0.35


def test_restriction_times():
    tri = line_triangle(2, 3, 2)
    s = ants.init(tri, 0.5, seed=4)
    res = run(s, 400, keep_records=True)
    for i in range(3):
        taus = restriction_times(res.records, tri, i)
        assert [t for t, _ in taus] == [r.n for r in res.records if r.delta[i]]
        assert len(taus) == s.N[i]
        prev = len(tri.parts[i])
        for _, w in taus:
            total = sum(w.values())
            assert total - prev == tri.lengths[i]  # one simple path in a line
            prev = total


def test_restricted_first_path_law_matches_single_nest():
    g3 = parse_sp("par(e,series(e,e))")
    tri = assemble(parse_sp("e"), parse_sp("series(e,e)"), g3)
    part = set(tri.parts[2])
    law = exact_le_distribution(tri.component_graph(2), None, N1, N2)
    direct = (tri.parts[2][0],)
    p = float(law.probs[direct])
    assert p == pytest.approx(2 / 3)
    runs = 100_000
    hits = 0
    for seed in range(runs):
        s = AntsState(tri, 0.5, seed)
        while True:
            rec = s.step()
            inside = [e for e in rec.path if e in part]
            if inside:
                hits += len(inside) == 1
                break
    se = (p * (1 - p) / runs) ** 0.5
    assert abs(hits / runs - p) < 3 * se


def test_single_nest_examples():
    snaps = single_nest_run(parse_sp("e"), 50, seed=0, checkpoints=range(51))
    assert all(s["W"] == [s["n"] + 1] for s in snaps)
    snaps = single_nest_run(line(4), 100, seed=0, checkpoints=[0, 10, 100])
    assert [s["C"] for s in snaps] == [Fraction(1, 4), Fraction(11, 4), Fraction(101, 4)]
    snaps = single_nest_run(parse_sp("par(e,e)"), 300, seed=2, checkpoints=range(301))
    assert all(sum(s["W"]) == s["n"] + 2 for s in snaps)


def test_growth_exponents_on_linear_counts():
    snaps = [{"n": 2**k, "N": [2**k, 2**k // 2, 1]} for k in range(1, 15)]
    e = growth_exponents(snaps)
    assert e[0] == pytest.approx(1) and e[1] == pytest.approx(1) and e[2] == pytest.approx(0)


def test_geometric_checkpoints():
    assert geometric_checkpoints(0, 10) == [1, 2, 4, 8, 10]
    assert geometric_checkpoints(4, 16) == [8, 16]
