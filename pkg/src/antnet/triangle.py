"""Triangle graphs built from three series-parallel components.

G1 joins N1 to F, G2 joins N2 to F and G3 joins N1 (its source) to N2 (its
sink). Vertex ids: N1 = 0, N2 = 1, F = 2, then the internal vertices of G1,
G2 and G3 in that order. Edge ids run over G1, then G2, then G3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .sp_graph import (
    Edge,
    FlatGraph,
    SPExpr,
    flatten,
    heights,
    line,
    n_leaves,
    parse_sp,
    relabel,
)

N1, N2, FOOD = 0, 1, 2


@dataclass(frozen=True)
class TriangleSP:
    g1: SPExpr
    g2: SPExpr
    g3: SPExpr
    graph: FlatGraph
    parts: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @property
    def components(self) -> tuple[SPExpr, SPExpr, SPExpr]:
        return self.g1, self.g2, self.g3

    @property
    def lengths(self) -> tuple[int, int, int]:
        return tuple(heights(g)[0] for g in self.components)  # type: ignore[return-value]

    @property
    def max_lengths(self) -> tuple[int, int, int]:
        return tuple(heights(g)[1] for g in self.components)  # type: ignore[return-value]

    def component_of(self) -> list[int]:
        """Edge id -> component index (0, 1, 2)."""
        comp = [0] * len(self.graph.edges)
        for i, part in enumerate(self.parts):
            for e in part:
                comp[e] = i
        return comp

    def global_expr(self, i: int) -> SPExpr:
        """Component ``i`` with leaves relabelled to global edge ids."""
        return relabel(self.components[i], self.parts[i][0])

    def component_graph(self, i: int) -> FlatGraph:
        """Component ``i`` alone, with global vertex and edge ids."""
        keep = set(self.parts[i])
        edges = tuple(e for e in self.graph.edges if e.id in keep)
        verts = sorted({x for e in edges for x in (e.u, e.v)})
        source, sink = ((N1, FOOD), (N2, FOOD), (N1, N2))[i]
        return FlatGraph(vertices=tuple(verts), edges=edges, source=source, sink=sink)


def assemble(g1: SPExpr, g2: SPExpr, g3: SPExpr) -> TriangleSP:
    edges: list[Edge] = []
    parts = []
    next_vertex = 3
    offset = 0
    for expr, (s, t) in zip((g1, g2, g3), ((N1, FOOD), (N2, FOOD), (N1, N2))):
        if heights(expr)[0] < 1:
            raise ValueError("component height must be >= 1")
        k = n_leaves(expr)
        sub = flatten(relabel(expr, offset), source=s, sink=t, first_free=next_vertex)
        next_vertex += len(sub.vertices) - 2
        edges.extend(sub.edges)
        parts.append(tuple(range(offset, offset + k)))
        offset += k
    graph = FlatGraph(
        vertices=tuple(range(next_vertex)),
        edges=tuple(edges),
        source=N1,
        sink=FOOD,
        marks={"N1": N1, "N2": N2, "F": FOOD},
    )
    return TriangleSP(g1, g2, g3, graph, tuple(parts))  # type: ignore[arg-type]


def line_triangle(l1: int, l2: int, l3: int) -> TriangleSP:
    """The (l1, l2, l3)-triangle: each component is a path of l_i edges."""
    for name, value in (("l1", l1), ("l2", l2), ("l3", l3)):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be an integer >= 1, got {value}")
    return assemble(line(l1), line(l2), line(l3))


def from_config(cfg: Mapping) -> TriangleSP:
    """Build from ``{"lengths": [l1, l2, l3]}`` or ``{"g1": ..., "g2": ..., "g3": ...}``."""
    if "lengths" in cfg:
        lengths = list(cfg["lengths"])
        if len(lengths) != 3:
            raise ValueError("'lengths' needs exactly three entries")
        return line_triangle(*(int(x) for x in lengths))
    missing = [k for k in ("g1", "g2", "g3") if k not in cfg]
    if missing:
        raise ValueError(f"triangle config needs 'lengths' or g1/g2/g3 (missing {missing})")
    return assemble(parse_sp(cfg["g1"]), parse_sp(cfg["g2"]), parse_sp(cfg["g3"]))
