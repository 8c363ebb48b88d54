"""Builders for the graphs used in the examples, tests and documentation.

Edge coordinates always run from the first endpoint to the second; loops
start and end at the same vertex.  Unless stated otherwise the junction
vertices are Neumann and pendant tips are as documented per builder.
"""

from __future__ import annotations

import math
from typing import Sequence

from .graph import Edge, MetricGraph, VertexCondition


def interval(
    length: float = 1.0,
    left: VertexCondition | None = None,
    right: VertexCondition | None = None,
) -> MetricGraph:
    """A single edge; both ends Dirichlet by default."""
    left = left if left is not None else VertexCondition.dirichlet()
    right = right if right is not None else VertexCondition.dirichlet()
    return MetricGraph(
        {0: left, 1: right},
        {0: Edge(0, 1, length)},
    )


def star3(
    lengths: Sequence[float] = (0.9, 1.0, 1.0),
    center: VertexCondition | None = None,
    tips: VertexCondition | None = None,
) -> MetricGraph:
    """Three edges joined at a central vertex (Neumann by default), tips
    Dirichlet by default."""
    center = center if center is not None else VertexCondition.neumann()
    tips = tips if tips is not None else VertexCondition.dirichlet()
    verts = {0: center, 1: tips, 2: tips, 3: tips}
    edges = {
        i: Edge(0, i + 1, float(L)) for i, L in enumerate(lengths)
    }
    return MetricGraph(verts, edges)


def lasso(loop: float = 1.0, tail: float = 1.3) -> MetricGraph:
    """One loop with a pendant edge; junction and tail end Neumann."""
    return MetricGraph(
        {0: VertexCondition.neumann(), 1: VertexCondition.neumann()},
        {0: Edge(0, 0, loop), 1: Edge(0, 1, tail)},
    )


def figure_eight(
    l1: float = 1.0, l2: float = 1.0 / math.sqrt(2.0)
) -> MetricGraph:
    """Two loops sharing one Neumann vertex; incommensurate lengths by
    default so that loop eigenvalues do not collide."""
    return MetricGraph(
        {0: VertexCondition.neumann()},
        {0: Edge(0, 0, l1), 1: Edge(0, 0, l2)},
    )


def loop_with_edge(loop: float = 1.0, pendant: float = 1.0) -> MetricGraph:
    """A loop plus a pendant edge of comparable length, both ends Neumann."""
    return MetricGraph(
        {0: VertexCondition.neumann(), 1: VertexCondition.neumann()},
        {0: Edge(0, 0, loop), 1: Edge(0, 1, pendant)},
    )


def path(
    lengths: Sequence[float],
    conditions: Sequence[VertexCondition] | None = None,
) -> MetricGraph:
    """A chain of edges; all vertices Neumann unless given explicitly."""
    n = len(lengths)
    if conditions is None:
        conditions = [VertexCondition.neumann()] * (n + 1)
    if len(conditions) != n + 1:
        raise ValueError("need one condition per vertex")
    verts = {i: c for i, c in enumerate(conditions)}
    edges = {i: Edge(i, i + 1, float(L)) for i, L in enumerate(lengths)}
    return MetricGraph(verts, edges)


BUNDLED = {
    "interval": lambda: interval(),
    "star3_short": lambda: star3((0.9, 1.0, 1.0)),
    "star3_long": lambda: star3((1.1, 1.0, 1.0)),
    "lasso": lambda: lasso(),
    "figure8": lambda: figure_eight(),
    "loop_edge": lambda: loop_with_edge(),
}
