"""Plain-text graph format.

One declaration per line, '#' starts a comment:

    vertex <id> neumann
    vertex <id> dirichlet
    vertex <id> robin <alpha>
    vertex <id> angle <phi>
    edge <id> <u> <v> length <L>

Vertex ids and edge ids are non-negative integers; L must be positive.
"""

from __future__ import annotations

import math

from .errors import InvalidGraph, ParseError
from .graph import Edge, MetricGraph, VertexCondition


def _parse_int(tok: str, what: str, line: int) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", line) from None
    if val < 0:
        raise ParseError(f"{what} must be non-negative, got {val}", line)
    return val


def _parse_float(tok: str, what: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected number for {what}, got {tok!r}", line) from None


def parse_graph(text: str) -> MetricGraph:
    vertices: dict[int, VertexCondition] = {}
    edges: dict[int, Edge] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kind = toks[0].lower()
        if kind == "vertex":
            if len(toks) < 3:
                raise ParseError("vertex needs an id and a condition", lineno)
            vid = _parse_int(toks[1], "vertex id", lineno)
            if vid in vertices:
                raise ParseError(f"duplicate vertex {vid}", lineno)
            cond = toks[2].lower()
            if cond == "neumann" and len(toks) == 3:
                vertices[vid] = VertexCondition.neumann()
            elif cond == "dirichlet" and len(toks) == 3:
                vertices[vid] = VertexCondition.dirichlet()
            elif cond == "robin" and len(toks) == 4:
                vertices[vid] = VertexCondition.robin(
                    _parse_float(toks[3], "alpha", lineno)
                )
            elif cond == "angle" and len(toks) == 4:
                vertices[vid] = VertexCondition(
                    _parse_float(toks[3], "phi", lineno)
                )
            else:
                raise ParseError(f"bad vertex condition {line!r}", lineno)
        elif kind == "edge":
            if len(toks) != 6 or toks[4].lower() != "length":
                raise ParseError(
                    "edge syntax: edge <id> <u> <v> length <L>", lineno
                )
            eid = _parse_int(toks[1], "edge id", lineno)
            if eid in edges:
                raise ParseError(f"duplicate edge {eid}", lineno)
            u = _parse_int(toks[2], "vertex id", lineno)
            v = _parse_int(toks[3], "vertex id", lineno)
            L = _parse_float(toks[5], "length", lineno)
            if not (math.isfinite(L) and L > 0.0):
                raise ParseError(f"edge length must be positive, got {L}", lineno)
            edges[eid] = Edge(u, v, L)
        else:
            raise ParseError(f"unknown declaration {toks[0]!r}", lineno)
    if not edges:
        raise ParseError("no edges declared")
    missing = sorted(
        ({e.u for e in edges.values()} | {e.v for e in edges.values()})
        - set(vertices)
    )
    if missing:
        raise ParseError(f"edges reference undeclared vertices {missing}")
    try:
        return MetricGraph(vertices, edges)
    except InvalidGraph as exc:
        raise ParseError(str(exc)) from exc


def load_graph(path) -> MetricGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def format_graph(g: MetricGraph) -> str:
    lines = []
    for vid, cond in g.vertices():
        if cond.is_dirichlet:
            lines.append(f"vertex {vid} dirichlet")
        elif cond.phi == 0.0:
            lines.append(f"vertex {vid} neumann")
        else:
            lines.append(f"vertex {vid} angle {cond.phi!r}")
    for eid, e in g.edges():
        lines.append(f"edge {eid} {e.u} {e.v} length {e.length!r}")
    return "\n".join(lines) + "\n"
