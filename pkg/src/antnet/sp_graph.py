"""Series-parallel graph algebra.

Expressions are binary composition trees over single edges. The textual
form is::

    expr := "e" | "series(" expr "," expr ")" | "par(" expr "," expr ")"

Leaves are labelled 0, 1, 2, ... in left-to-right order by the parser, and
each leaf label is also the id of the corresponding edge once the expression
is realised with :func:`flatten`.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterator, Mapping, Sequence, Union


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Series:
    left: "SPExpr"
    right: "SPExpr"


@dataclass(frozen=True)
class Parallel:
    left: "SPExpr"
    right: "SPExpr"


SPExpr = Union[Leaf, Series, Parallel]


class SPSyntaxError(ValueError):
    """Raised by :func:`parse_sp`; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.next_label = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def accept(self, word: str) -> bool:
        self.skip_ws()
        if self.text.startswith(word, self.pos):
            self.pos += len(word)
            return True
        return False

    def expect(self, word: str) -> None:
        if not self.accept(word):
            self.skip_ws()
            found = self.text[self.pos : self.pos + 1] or "end of input"
            raise SPSyntaxError(f"expected {word!r}, found {found!r}", self.pos)

    def expr(self) -> SPExpr:
        self.skip_ws()
        start = self.pos
        for keyword, node in (("series", Series), ("par", Parallel)):
            if self.accept(keyword):
                self.expect("(")
                left = self.expr()
                self.expect(",")
                right = self.expr()
                self.expect(")")
                return node(left, right)
        if self.accept("e"):
            leaf = Leaf(self.next_label)
            self.next_label += 1
            return leaf
        if self.pos >= len(self.text):
            raise SPSyntaxError("unexpected end of input", start)
        raise SPSyntaxError(f"unexpected character {self.text[self.pos]!r}", start)


def parse_sp(text: str) -> SPExpr:
    """Parse an SP expression string into a composition tree."""
    if not text or not text.strip():
        raise SPSyntaxError("empty expression", 0)
    parser = _Parser(text)
    tree = parser.expr()
    parser.skip_ws()
    if parser.pos != len(text):
        raise SPSyntaxError("trailing input", parser.pos)
    return tree


def to_text(expr: SPExpr) -> str:
    """Inverse of :func:`parse_sp` (labels are implied by leaf order)."""
    if isinstance(expr, Leaf):
        return "e"
    name = "series" if isinstance(expr, Series) else "par"
    return f"{name}({to_text(expr.left)},{to_text(expr.right)})"


def leaves(expr: SPExpr) -> Iterator[Leaf]:
    if isinstance(expr, Leaf):
        yield expr
    else:
        yield from leaves(expr.left)
        yield from leaves(expr.right)


def n_leaves(expr: SPExpr) -> int:
    return sum(1 for _ in leaves(expr))


def relabel(expr: SPExpr, offset: int) -> SPExpr:
    """Shift every leaf label by ``offset``."""
    if isinstance(expr, Leaf):
        return Leaf(expr.label + offset)
    return type(expr)(relabel(expr.left, offset), relabel(expr.right, offset))


def line(length: int) -> SPExpr:
    """``length`` edges in series, labelled 0..length-1 from source to sink."""
    if length < 1:
        raise ValueError(f"line length must be >= 1, got {length}")
    expr: SPExpr = Leaf(0)
    for k in range(1, length):
        expr = Series(expr, Leaf(k))
    return expr


def random_sp_expr(rng: random.Random, n: int, p_series: float = 0.5) -> SPExpr:
    """Random expression with exactly ``n`` leaves (labelled left to right)."""
    if n < 1:
        raise ValueError("need at least one leaf")

    def build(k: int) -> SPExpr:
        if k == 1:
            return Leaf(-1)
        cut = rng.randint(1, k - 1)
        node = Series if rng.random() < p_series else Parallel
        return node(build(cut), build(k - cut))

    # relabel left to right so the result matches what parse_sp would produce
    return parse_sp(to_text(build(n)))


# ---------------------------------------------------------------------------
# realisation


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int

    def other(self, x: int) -> int:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"vertex {x} is not an endpoint of edge {self.id}")


@dataclass
class FlatGraph:
    """A concrete multigraph with a marked source and sink.

    ``marks`` holds any extra named vertices (the triangle module stores
    N1, N2 and F there).
    """

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    source: int
    sink: int
    weights: dict[int, int | float | Fraction] = field(default_factory=dict)
    marks: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.weights:
            self.weights = {e.id: 1 for e in self.edges}

    @property
    def edge_by_id(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """vertex -> list of (neighbour, edge id), in edge-id order."""
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.id):
            adj[e.u].append((e.v, e.id))
            adj[e.v].append((e.u, e.id))
        return adj

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "u": e.u, "v": e.v} for e in self.edges],
            "source": self.source,
            "sink": self.sink,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "FlatGraph":
        edges = tuple(Edge(int(e["id"]), int(e["u"]), int(e["v"])) for e in data["edges"])
        return cls(
            vertices=tuple(int(v) for v in data["vertices"]),
            edges=edges,
            source=int(data["source"]),
            sink=int(data["sink"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "FlatGraph":
        return cls.from_dict(json.loads(text))


def flatten(expr: SPExpr, source: int = 0, sink: int = 1, first_free: int = 2) -> FlatGraph:
    """Realise ``expr`` as a multigraph.

    Source and sink get ids ``source`` and ``sink``; internal vertices created
    by series merges are numbered from ``first_free`` in depth-first,
    left-to-right order, so numbering is canonical for a given expression.
    """
    edges: list[Edge] = []
    counter = [first_free]

    def walk(node: SPExpr, s: int, t: int) -> None:
        if isinstance(node, Leaf):
            edges.append(Edge(node.label, s, t))
        elif isinstance(node, Series):
            mid = counter[0]
            counter[0] += 1
            walk(node.left, s, mid)
            walk(node.right, mid, t)
        else:
            walk(node.left, s, t)
            walk(node.right, s, t)

    walk(expr, source, sink)
    labels = [e.id for e in edges]
    if len(set(labels)) != len(labels):
        raise ValueError("leaf labels must be unique")
    vertices = (source, sink) + tuple(range(first_free, counter[0]))
    return FlatGraph(vertices=vertices, edges=tuple(sorted(edges, key=lambda e: e.id)),
                     source=source, sink=sink)


def heights(expr: SPExpr) -> tuple[int, int]:
    """(shortest, longest self-avoiding) source-sink path length."""
    if isinstance(expr, Leaf):
        return 1, 1
    lo1, hi1 = heights(expr.left)
    lo2, hi2 = heights(expr.right)
    if isinstance(expr, Series):
        return lo1 + lo2, hi1 + hi2
    return min(lo1, lo2), max(hi1, hi2)


def bfs_distances(graph: FlatGraph, root: int) -> dict[int, int]:
    adj = graph.adjacency()
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y, _ in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def shortest_path_edges(graph: FlatGraph) -> set[int]:
    """Edges lying on at least one shortest source-sink path."""
    ds = bfs_distances(graph, graph.source)
    dt = bfs_distances(graph, graph.sink)
    h = ds[graph.sink]
    out = set()
    for e in graph.edges:
        if ds[e.u] + 1 + dt[e.v] == h or ds[e.v] + 1 + dt[e.u] == h:
            out.add(e.id)
    return out


# ---------------------------------------------------------------------------
# conductance


def _exact(x) -> bool:
    return isinstance(x, (Integral, Rational)) and not isinstance(x, bool)


def effective_conductance(expr: SPExpr, weights: Mapping[int, object] | Sequence) -> int | float | Fraction:
    """Effective conductance between the source and sink of ``expr``.

    Integer or Fraction weights give an exact Fraction result; any float
    weight switches to float arithmetic. A zero conductance in series makes
    the whole series branch zero.
    """
    lookup = weights.__getitem__
    exact = all(_exact(lookup(leaf.label)) for leaf in leaves(expr))

    def cond(node: SPExpr):
        if isinstance(node, Leaf):
            w = lookup(node.label)
            if w < 0:
                raise ValueError(f"negative weight on edge {node.label}")
            return Fraction(w) if exact else float(w)
        a = cond(node.left)
        b = cond(node.right)
        if isinstance(node, Parallel):
            return a + b
        if a == 0 or b == 0:
            return Fraction(0) if exact else 0.0
        return a * b / (a + b)

    return cond(expr)
