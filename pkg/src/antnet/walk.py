"""Weighted random walks and backward loop-erasure."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from numbers import Integral
from typing import IO, Mapping

from .sp_graph import FlatGraph

DEFAULT_STEP_CAP = 10**9


class WalkError(RuntimeError):
    pass


class StepCapExceeded(WalkError):
    pass


class DeadEnd(WalkError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Vertices X_0..X_T and the edge crossed at each step (len(edges) == T)."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("need exactly one edge per step")

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class SimplePath:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("need exactly one edge per step")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f"path revisits a vertex: {self.vertices}")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.edges)


def run_walk(
    graph: FlatGraph,
    weights: Mapping[int, float] | None,
    start: int,
    absorb: int,
    rng: random.Random,
    step_cap: int = DEFAULT_STEP_CAP,
) -> Trajectory:
    """Walk from ``start`` until ``absorb`` is first hit.

    At each vertex an incident edge is chosen with probability proportional
    to its weight (parallel edges are separate choices). Integer weights are
    sampled exactly with one ``randrange`` draw against the integer total.
    """
    if start == absorb:
        raise ValueError("start and absorb must differ")
    if weights is None:
        weights = graph.weights
    adj = graph.adjacency()
    exact = all(isinstance(weights[e.id], Integral) for e in graph.edges)
    verts = [start]
    edges: list[int] = []
    u = start
    while u != absorb:
        if len(edges) >= step_cap:
            raise StepCapExceeded(f"walk exceeded {step_cap} steps")
        nbrs = adj[u]
        total = sum(weights[e] for _, e in nbrs)
        if total <= 0:
            raise DeadEnd(f"vertex {u} has no positive-weight edge")
        r = rng.randrange(total) if exact else rng.random() * total
        for v, e in nbrs:
            r -= weights[e]
            if r < 0:
                break
        else:  # float round-off on the last edge
            v, e = next((v, e) for v, e in reversed(nbrs) if weights[e] > 0)
        verts.append(v)
        edges.append(e)
        u = v
    return Trajectory(tuple(verts), tuple(edges))


def loop_erase_backward(traj: Trajectory) -> SimplePath:
    """Backward loop-erasure by the index recursion.

    i_0 is the first hitting time of the final vertex; while X_{i_j} is not
    X_0, i_{j+1} = min{i - 1 : X_i = X_{i_j}}. The kept edges are the ones
    crossed at steps i_{j+1} -> i_{j+1} + 1, returned in start-to-end order.
    """
    xs = traj.vertices
    first_hit: dict[int, int] = {}
    for i, x in enumerate(xs):
        first_hit.setdefault(x, i)
    i = first_hit[xs[-1]]
    rev_verts = [xs[i]]
    rev_edges = []
    while xs[i] != xs[0]:
        i = first_hit[xs[i]] - 1
        rev_edges.append(traj.edges[i])
        rev_verts.append(xs[i])
    return SimplePath(tuple(reversed(rev_verts)), tuple(reversed(rev_edges)))


def first_entry_predecessors(traj: Trajectory) -> dict[int, tuple[int, int]]:
    """For each visited vertex other than X_0: (vertex, edge) it was first entered from."""
    xs = traj.vertices
    pred: dict[int, tuple[int, int]] = {}
    seen = {xs[0]}
    for i, e in enumerate(traj.edges):
        v = xs[i + 1]
        if v not in seen:
            seen.add(v)
            pred[v] = (xs[i], e)
    return pred


def chain_from(pred: Mapping[int, tuple[int, int]], start: int, end: int) -> SimplePath:
    """Follow first-entry predecessors from ``end`` back to ``start``."""
    verts = [end]
    edges = []
    x = end
    while x != start:
        x, e = pred[x]
        verts.append(x)
        edges.append(e)
    return SimplePath(tuple(reversed(verts)), tuple(reversed(edges)))


def reverse(path: SimplePath) -> SimplePath:
    return SimplePath(tuple(reversed(path.vertices)), tuple(reversed(path.edges)))


def dump_trajectory(traj: Trajectory, fh: IO[str]) -> None:
    """Debug dump: one JSON list of vertex ids per line."""
    fh.write(json.dumps(list(traj.vertices)) + "\n")


class WalkEngine:
    """Integer-weight walk + loop-erasure kernel used by the ants process.

    Keeps per-vertex weight totals up to date so each walk step costs one
    ``randrange`` and a scan over the incident edges. The loop-erased path is
    read off the first-entry predecessors, which is the same path the index
    recursion of :func:`loop_erase_backward` produces.
    """

    def __init__(self, graph: FlatGraph, weights: Mapping[int, int] | None = None,
                 step_cap: int = DEFAULT_STEP_CAP):
        n_vertices = max(graph.vertices) + 1
        n_edges = max(e.id for e in graph.edges) + 1
        self.step_cap = step_cap
        self.weights = [0] * n_edges
        src = graph.weights if weights is None else weights
        for e in graph.edges:
            w = src[e.id]
            if not isinstance(w, Integral) or w < 0:
                raise ValueError("WalkEngine needs non-negative integer weights")
            self.weights[e.id] = int(w)
        self.endpoints = [(0, 0)] * n_edges
        for e in graph.edges:
            self.endpoints[e.id] = (e.u, e.v)
        adj = graph.adjacency()
        self.nbrs = [tuple(adj.get(v, ())) for v in range(n_vertices)]
        self.totals = [sum(self.weights[e] for _, e in self.nbrs[v]) for v in range(n_vertices)]
        self._stamp = [0] * n_vertices
        self._pv = [0] * n_vertices
        self._pe = [0] * n_vertices
        self._tick = 0

    def loop_erased(self, start: int, absorb: int, rng: random.Random) -> tuple[list[int], int]:
        """Walk start -> absorb; return (LE edge ids in absorb-to-start order, walk length)."""
        self._tick += 1
        tick = self._tick
        stamp, pv, pe = self._stamp, self._pv, self._pe
        nbrs, w, totals = self.nbrs, self.weights, self.totals
        getrandbits = rng.getrandbits
        cap = self.step_cap
        stamp[start] = tick
        u = start
        steps = 0
        while u != absorb:
            total = totals[u]
            if total <= 0:
                raise DeadEnd(f"vertex {u} has no positive-weight edge")
            # inlined randrange(total): same draws, no call overhead
            k = total.bit_length()
            r = getrandbits(k)
            while r >= total:
                r = getrandbits(k)
            for v, e in nbrs[u]:
                r -= w[e]
                if r < 0:
                    break
            if stamp[v] != tick:
                stamp[v] = tick
                pv[v] = u
                pe[v] = e
            u = v
            steps += 1
            if steps >= cap:
                raise StepCapExceeded(f"walk exceeded {cap} steps")
        path = []
        x = absorb
        while x != start:
            path.append(pe[x])
            x = pv[x]
        return path, steps

    def reinforce(self, edges) -> None:
        w, totals, ends = self.weights, self.totals, self.endpoints
        for e in edges:
            w[e] += 1
            a, b = ends[e]
            totals[a] += 1
            totals[b] += 1
