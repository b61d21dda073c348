"""Exact laws of loop-erased walks and hitting probabilities on small graphs.

The backward loop-erasure of a walk only depends on the first-entry tree of
the vertices visited before absorption (the erased path is the predecessor
chain from the absorbing vertex). A walk can therefore be tracked as the
pair (current vertex, first-entry tree), which only ever grows. For a fixed
visited set the moves inside it form a finite absorbing chain, so the whole
law is a sequence of small linear solves over trees ordered by size.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral
from typing import Mapping

from .exact import SingularSystem, solve
from .sp_graph import FlatGraph, flatten


class StateSpaceTooLarge(RuntimeError):
    pass


@dataclass
class PathDistribution:
    """Law of a loop-erased path, keyed by the edge-id sequence start -> absorb."""

    start: int
    absorb: int
    probs: dict[tuple[int, ...], Fraction | float] = field(default_factory=dict)
    exact: bool = True

    def total(self):
        return sum(self.probs.values(), Fraction(0) if self.exact else 0.0)

    def reversed(self) -> "PathDistribution":
        return PathDistribution(self.absorb, self.start,
                                {tuple(reversed(p)): q for p, q in self.probs.items()}, self.exact)

    def to_json(self) -> str:
        rows = []
        for path, q in sorted(self.probs.items()):
            if isinstance(q, Fraction):
                prob = f"{q.numerator}/{q.denominator}"
            else:
                prob = repr(float(q))
            rows.append({"path": list(path), "prob": prob})
        return json.dumps(rows)


def _prepare(graph: FlatGraph, weights: Mapping[int, object] | None):
    weights = graph.weights if weights is None else weights
    exact = all(isinstance(weights[e.id], (Integral, Fraction)) for e in graph.edges)
    conv = Fraction if exact else float
    adj: dict[int, list[tuple[int, int, object]]] = {v: [] for v in graph.vertices}
    for e in graph.edges:
        w = weights[e.id]
        if w < 0:
            raise ValueError(f"negative weight on edge {e.id}")
        if w == 0:
            continue
        adj[e.u].append((e.v, e.id, conv(w)))
        adj[e.v].append((e.u, e.id, conv(w)))
    totals = {v: sum((w for _, _, w in adj[v]), conv(0)) for v in graph.vertices}
    return adj, totals, exact, conv


def _le_law(graph, weights, start, absorb, max_vertices, max_states, excursion):
    if start == absorb:
        raise ValueError("start and absorb must differ")
    if len(graph.vertices) > max_vertices:
        raise StateSpaceTooLarge(f"{len(graph.vertices)} vertices exceeds the cap of {max_vertices}")
    adj, totals, exact, conv = _prepare(graph, weights)
    zero, one = conv(0), conv(1)

    # fundamental-matrix rows are shared by every tree with the same visited set
    visit_cache: dict[tuple[frozenset, int], dict[int, object]] = {}

    def expected_visits(active: tuple[int, ...], entry: int):
        key = (frozenset(active), entry)
        if key in visit_cache:
            return visit_cache[key]
        idx = {v: i for i, v in enumerate(active)}
        k = len(active)
        # (I - Q)^T x = e_entry
        A = [[zero] * k for _ in range(k)]
        for i in range(k):
            A[i][i] = one
        for a in active:
            if totals[a] == 0:
                raise SingularSystem(f"vertex {a} has no positive-weight edge")
            for b, _, w in adj[a]:
                if b in idx:
                    A[idx[b]][idx[a]] -= w / totals[a]
        rhs = [zero] * k
        rhs[idx[entry]] = one
        x = solve(A, rhs, exact)
        out = {v: x[idx[v]] for v in active}
        visit_cache[key] = out
        return out

    probs: dict[tuple[int, ...], object] = defaultdict(lambda: zero)
    # state: (sorted pred items, entry vertex) -> mass
    layer: dict[tuple[tuple, int], object] = {((), start): one}
    n_states = 0
    absorbed = zero
    while layer:
        nxt: dict[tuple[tuple, int], object] = defaultdict(lambda: zero)
        for (tree, entry), mass in layer.items():
            n_states += 1
            if n_states > max_states:
                raise StateSpaceTooLarge(f"more than {max_states} augmented states")
            pred = dict((v, (p, e)) for v, p, e in tree)
            visited = {start} | set(pred)
            if excursion and tree:
                active = tuple(sorted(visited - {start}))
            else:
                active = tuple(sorted(visited))
            visits = expected_visits(active, entry)
            for a in active:
                va = visits[a]
                if va == 0:
                    continue
                for u, e, w in adj[a]:
                    if u in visited:
                        continue  # internal move, or a killed return to start
                    q = mass * va * w / totals[a]
                    if u == absorb:
                        edges = [e]
                        x = a
                        while x != start:
                            x, pe = pred[x][0], pred[x][1]
                            edges.append(pe)
                        probs[tuple(reversed(edges))] += q
                        absorbed += q
                    else:
                        new_tree = tuple(sorted(tree + ((u, a, e),)))
                        nxt[(new_tree, u)] += q
        layer = nxt
    if excursion:
        if absorbed == 0:
            raise ValueError("conditioning event has probability zero")
        probs = {p: q / absorbed for p, q in probs.items()}
    elif absorbed == 0:
        raise SingularSystem("absorbing vertex is unreachable")
    return PathDistribution(start, absorb, dict(probs), exact)


def exact_le_distribution(graph: FlatGraph, weights: Mapping[int, object] | None, start: int, absorb: int,
                          max_vertices: int = 8, max_states: int = 2_000_000) -> PathDistribution:
    """Law of the backward loop-erasure of the walk from ``start`` stopped at ``absorb``."""
    return _le_law(graph, weights, start, absorb, max_vertices, max_states, excursion=False)


def excursion_le_distribution(graph: FlatGraph, weights: Mapping[int, object] | None, start: int,
                              absorb: int, max_vertices: int = 8,
                              max_states: int = 2_000_000) -> PathDistribution:
    """Same law for the walk conditioned to reach ``absorb`` before returning to ``start``."""
    return _le_law(graph, weights, start, absorb, max_vertices, max_states, excursion=True)


def exact_hit_before(graph: FlatGraph, weights: Mapping[int, object] | None, start: int,
                     target_a: int, target_b: int):
    """P(walk from ``start`` hits ``target_a`` before ``target_b``)."""
    if target_a == target_b:
        raise ValueError("targets must differ")
    if start == target_a:
        return Fraction(1)
    if start == target_b:
        return Fraction(0)
    adj, totals, exact, conv = _prepare(graph, weights)
    zero, one = conv(0), conv(1)

    # restrict to vertices reachable from start without passing a target
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y, _, _ in adj[x]:
            if y not in seen and y not in (target_a, target_b):
                seen.add(y)
                stack.append(y)
    reaches = any(y in (target_a, target_b) for x in seen for y, _, _ in adj[x])
    if not reaches:
        raise ValueError("start cannot reach either target")
    free = sorted(seen)
    idx = {v: i for i, v in enumerate(free)}
    k = len(free)
    A = [[zero] * k for _ in range(k)]
    b = [zero] * k
    for v in free:
        i = idx[v]
        A[i][i] = one
        for u, _, w in adj[v]:
            q = w / totals[v]
            if u == target_a:
                b[i] += q
            elif u in idx:
                A[i][idx[u]] -= q
    x = solve(A, b, exact)
    return x[idx[start]]


def tv_distance(d1: PathDistribution, d2: PathDistribution, reverse: bool = False):
    """Total variation distance; with ``reverse`` compares d1(path) with d2(reversed path)."""
    other = d2.reversed() if reverse else d2
    exact = d1.exact and other.exact
    zero = Fraction(0) if exact else 0.0
    keys = set(d1.probs) | set(other.probs)
    return sum((abs(d1.probs.get(k, zero) - other.probs.get(k, zero)) for k in keys), zero) / 2


def random_weighted_sp(rng, max_vertices: int = 8, max_leaves: int = 10, max_weight: int = 6):
    """A random SP graph with at most ``max_vertices`` vertices and integer weights in 1..max_weight."""
    from .sp_graph import random_sp_expr

    while True:
        expr = random_sp_expr(rng, rng.randint(2, max_leaves))
        graph = flatten(expr)
        if len(graph.vertices) <= max_vertices:
            weights = {e.id: rng.randint(1, max_weight) for e in graph.edges}
            return expr, graph, weights
