"""Metric graphs as immutable values, plus the surgery used everywhere else.

A metric graph is a set of vertices joined by edges of positive length.  A
function on the graph lives on the edges; each edge carries a coordinate
x in [0, L] running from its first endpoint to its second.  Vertices carry
delta type matching conditions written in angle form,

    cos(phi/2) * sum of inward derivatives = sin(phi/2) * f(v),

so that phi = 0 is the Neumann/Kirchhoff condition, phi = pi is Dirichlet
and tan(phi/2) is the coupling strength alpha of the usual Robin form
(sum of inward derivatives = alpha * f(v)).  Storing the angle makes the
Dirichlet case a regular value instead of a limit.

All operations here are pure: they return new graphs and never mutate
their inputs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConsistencyError,
    DirichletGlue,
    Disconnects,
    ImproperPartition,
    InvalidGraph,
)

TWO_PI = 2.0 * math.pi


def wrap_angle(phi: float) -> float:
    """Reduce an angle to the fundamental domain (-pi, pi]."""
    r = math.remainder(float(phi), TWO_PI)
    if r <= -math.pi:
        r = math.pi
    return r


@dataclass(frozen=True)
class VertexCondition:
    """Matching condition at a vertex, stored as an angle in (-pi, pi]."""

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_angle(self.phi))

    @classmethod
    def neumann(cls) -> "VertexCondition":
        return cls(0.0)

    @classmethod
    def dirichlet(cls) -> "VertexCondition":
        return cls(math.pi)

    @classmethod
    def robin(cls, alpha: float) -> "VertexCondition":
        """Coupling strength alpha = tan(phi/2); alpha = +inf is Dirichlet."""
        if math.isinf(alpha):
            return cls.dirichlet()
        return cls(2.0 * math.atan(alpha))

    @property
    def is_dirichlet(self) -> bool:
        return self.phi == math.pi

    @property
    def alpha(self) -> float:
        if self.is_dirichlet:
            return math.inf
        return math.tan(0.5 * self.phi)

    def describe(self) -> str:
        if self.is_dirichlet:
            return "dirichlet"
        if self.phi == 0.0:
            return "neumann"
        return f"robin {self.alpha:.12g}"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    length: float


class MetricGraph:
    """Immutable metric graph.

    Vertices and edges are keyed by non-negative integer ids.  Ids are
    arbitrary but stable; all iteration is in sorted id order so that every
    derived quantity is deterministic.
    """

    def __init__(
        self,
        vertices: Mapping[int, VertexCondition],
        edges: Mapping[int, Edge],
    ):
        self._vertices = {int(k): v for k, v in sorted(vertices.items())}
        self._edges = {int(k): e for k, e in sorted(edges.items())}
        self._validate()
        self._ends: dict[int, tuple[tuple[int, int], ...]] = {}
        ends: dict[int, list[tuple[int, int]]] = {v: [] for v in self._vertices}
        for eid in self.edge_ids:
            e = self._edges[eid]
            ends[e.u].append((eid, 0))
            ends[e.v].append((eid, 1))
        for vid, lst in ends.items():
            self._ends[vid] = tuple(sorted(lst))
        self._key = (
            tuple((v, c.phi) for v, c in self._vertices.items()),
            tuple((k, e.u, e.v, e.length) for k, e in self._edges.items()),
        )

    def _validate(self):
        if not self._edges:
            raise InvalidGraph("graph has no edges")
        for eid, e in self._edges.items():
            if not (math.isfinite(e.length) and e.length > 0.0):
                raise InvalidGraph(f"edge {eid} has non-positive length")
            for vid in (e.u, e.v):
                if vid not in self._vertices:
                    raise InvalidGraph(f"edge {eid} references missing vertex {vid}")
        used = {e.u for e in self._edges.values()}
        used |= {e.v for e in self._edges.values()}
        isolated = set(self._vertices) - used
        if isolated:
            raise InvalidGraph(f"isolated vertices {sorted(isolated)}")

    # -- accessors ---------------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(self._vertices)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(self._edges)

    def condition(self, vid: int) -> VertexCondition:
        return self._vertices[vid]

    def edge(self, eid: int) -> Edge:
        return self._edges[eid]

    def ends_at(self, vid: int) -> tuple[tuple[int, int], ...]:
        """Edge ends (edge id, side) incident to a vertex; a loop appears
        twice, once per side."""
        return self._ends[vid]

    def degree(self, vid: int) -> int:
        return len(self._ends[vid])

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def total_length(self) -> float:
        return sum(e.length for e in self._edges.values())

    def vertices(self) -> Iterable[tuple[int, VertexCondition]]:
        return self._vertices.items()

    def edges(self) -> Iterable[tuple[int, Edge]]:
        return self._edges.items()

    # -- derivation --------------------------------------------------------

    def with_condition(self, vid: int, cond: VertexCondition) -> "MetricGraph":
        if vid not in self._vertices:
            raise InvalidGraph(f"no vertex {vid}")
        verts = dict(self._vertices)
        verts[vid] = cond
        return MetricGraph(verts, self._edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricGraph) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"MetricGraph({self.n_vertices} vertices, {self.n_edges} edges)"


# -- connectivity and topology ----------------------------------------------


def component_map(g: MetricGraph) -> dict[int, int]:
    """Component label for each vertex.  Labels are 0..k-1, assigned in
    order of the smallest vertex id contained in the component."""
    label: dict[int, int] = {}
    next_label = 0
    for start in g.vertex_ids:
        if start in label:
            continue
        label[start] = next_label
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for eid, side in g.ends_at(u):
                e = g.edge(eid)
                w = e.v if side == 0 else e.u
                if w not in label:
                    label[w] = next_label
                    queue.append(w)
        next_label += 1
    return label


def components(g: MetricGraph) -> list[frozenset[int]]:
    label = component_map(g)
    k = max(label.values()) + 1
    out: list[set[int]] = [set() for _ in range(k)]
    for v, c in label.items():
        out[c].add(v)
    return [frozenset(s) for s in out]


def is_connected(g: MetricGraph) -> bool:
    return max(component_map(g).values()) == 0


def betti(g: MetricGraph) -> int:
    """First Betti number |E| - |V| + (number of components)."""
    k = max(component_map(g).values()) + 1
    return g.n_edges - g.n_vertices + k


# -- points and partitions ---------------------------------------------------


@dataclass(frozen=True)
class EdgePoint:
    """A point at coordinate x on an edge (in that edge's own coordinate)."""

    edge: int
    x: float


@dataclass(frozen=True)
class Partition:
    """A finite set of edge points, kept in input order.

    ``proper`` records whether every point lies strictly inside its edge and
    all points are pairwise distinct; only proper partitions can be cut.
    """

    points: tuple[EdgePoint, ...]
    proper: bool

    @property
    def mu(self) -> int:
        return len(self.points)

    def on_edge(self, eid: int) -> tuple[EdgePoint, ...]:
        return tuple(p for p in self.points if p.edge == eid)


def make_partition(
    g: MetricGraph,
    points: Sequence[EdgePoint],
    vertex_tol: float = 0.0,
) -> Partition:
    """Build a partition and classify it.

    vertex_tol flags a point improper when it lies within vertex_tol * L of
    either end of its edge (used when the points come from a numerical zero
    set); with the default 0.0 only exact endpoint hits are improper.
    """
    pts = tuple(EdgePoint(int(p.edge), float(p.x)) for p in points)
    proper = True
    seen = set()
    for p in pts:
        if p.edge not in g.edge_ids:
            raise InvalidGraph(f"partition point on missing edge {p.edge}")
        L = g.edge(p.edge).length
        margin = vertex_tol * L
        if not (margin < p.x < L - margin) or (p.edge, p.x) in seen:
            proper = False
        seen.add((p.edge, p.x))
    return Partition(pts, proper)


# -- cutting ------------------------------------------------------------------


@dataclass(frozen=True)
class Located:
    """Where an original-coordinate point lands in a derived graph."""

    edge: int
    x: float
    at_cut: bool


class EdgeMap:
    """Coordinate bookkeeping between a graph and the result of cutting it.

    Every edge of the derived graph is a segment [offset, offset + length]
    of exactly one original edge, with the same orientation.
    """

    def __init__(
        self,
        parent: dict[int, tuple[int, float]],
        segments: dict[int, tuple[tuple[int, float, float], ...]],
    ):
        self.parent = parent
        self.segments = segments

    def to_original(self, p: EdgePoint) -> EdgePoint:
        orig, offset = self.parent[p.edge]
        return EdgePoint(orig, offset + p.x)

    def locate(self, p: EdgePoint) -> Located:
        """Find the segment containing an original-coordinate point.

        Interior hits are exact; a point sitting exactly at a cut is mapped
        to the right end of the segment on its left and flagged at_cut.
        """
        segs = self.segments[p.edge]
        for eid, offset, length in segs:
            if offset < p.x < offset + length:
                return Located(eid, p.x - offset, False)
        for eid, offset, length in segs:
            if p.x == offset + length:
                return Located(eid, length, True)
            if p.x == offset:
                return Located(eid, 0.0, True)
        raise ValueError(f"point {p} outside edge range")


class CutResult:
    """Outcome of cutting a graph at a proper partition.

    Each cut point becomes a pair of new Dirichlet vertices: v_minus ends
    the segment on the smaller-coordinate side, v_plus starts the segment on
    the larger-coordinate side.  ``pairs`` is aligned with the input points.
    """

    def __init__(
        self,
        graph: MetricGraph,
        pairs: tuple[tuple[int, int], ...],
        edge_map: EdgeMap,
    ):
        self.graph = graph
        self.pairs = pairs
        self.edge_map = edge_map
        self.vertex_component = component_map(graph)
        self.n_components = max(self.vertex_component.values()) + 1

    def component_of_edge(self, eid: int) -> int:
        return self.vertex_component[self.graph.edge(eid).u]

    def component_of_point(self, p: EdgePoint) -> int:
        loc = self.edge_map.locate(p)
        return self.component_of_edge(loc.edge)

    def subgraph(self, comp: int) -> MetricGraph:
        verts = {
            v: self.graph.condition(v)
            for v, c in self.vertex_component.items()
            if c == comp
        }
        edges = {
            eid: e for eid, e in self.graph.edges() if e.u in verts
        }
        return MetricGraph(verts, edges)

    def subgraphs(self) -> list[MetricGraph]:
        return [self.subgraph(i) for i in range(self.n_components)]


def cut(g: MetricGraph, p: Partition) -> CutResult:
    """Cut the graph at every partition point.

    Adds two Dirichlet vertices and one edge per point; vertex conditions
    elsewhere are unchanged.  Raises ImproperPartition unless p is proper.
    """
    if not p.proper:
        raise ImproperPartition("partition has endpoint hits or duplicate points")
    by_edge: dict[int, list[tuple[float, int]]] = {}
    for idx, pt in enumerate(p.points):
        by_edge.setdefault(pt.edge, []).append((pt.x, idx))

    verts = {v: c for v, c in g.vertices()}
    edges: dict[int, Edge] = {}
    next_vid = (max(g.vertex_ids) + 1) if g.vertex_ids else 0
    next_eid = max(g.edge_ids) + 1
    pairs: list[tuple[int, int] | None] = [None] * len(p.points)
    parent: dict[int, tuple[int, float]] = {}
    segments: dict[int, tuple[tuple[int, float, float], ...]] = {}
    dirichlet = VertexCondition.dirichlet()

    for eid in g.edge_ids:
        e = g.edge(eid)
        if eid not in by_edge:
            edges[eid] = e
            parent[eid] = (eid, 0.0)
            segments[eid] = ((eid, 0.0, e.length),)
            continue
        cuts = sorted(by_edge[eid])
        segs: list[tuple[int, float, float]] = []
        prev_x = 0.0
        prev_v = e.u
        seg_id = eid
        for x, idx in cuts:
            vm = next_vid
            vp = next_vid + 1
            next_vid += 2
            verts[vm] = dirichlet
            verts[vp] = dirichlet
            pairs[idx] = (vm, vp)
            edges[seg_id] = Edge(prev_v, vm, x - prev_x)
            parent[seg_id] = (eid, prev_x)
            segs.append((seg_id, prev_x, x - prev_x))
            prev_x, prev_v = x, vp
            seg_id = next_eid
            next_eid += 1
        edges[seg_id] = Edge(prev_v, e.v, e.length - prev_x)
        parent[seg_id] = (eid, prev_x)
        segs.append((seg_id, prev_x, e.length - prev_x))
        segments[eid] = tuple(segs)

    graph = MetricGraph(verts, edges)
    return CutResult(graph, tuple(pairs), EdgeMap(parent, segments))  # type: ignore[arg-type]


def glue(g: MetricGraph, v0: int, v1: int) -> MetricGraph:
    """Identify two distinct Robin vertices; coupling strengths add.

    The surviving vertex keeps id v0.  Gluing a Dirichlet vertex raises
    DirichletGlue because infinite strengths do not add.
    """
    if v0 == v1:
        raise InvalidGraph("glue needs two distinct vertices")
    c0, c1 = g.condition(v0), g.condition(v1)
    if c0.is_dirichlet or c1.is_dirichlet:
        raise DirichletGlue("cannot glue a Dirichlet vertex")
    verts = {v: c for v, c in g.vertices() if v != v1}
    verts[v0] = VertexCondition.robin(c0.alpha + c1.alpha)
    edges = {}
    for eid, e in g.edges():
        u = v0 if e.u == v1 else e.u
        v = v0 if e.v == v1 else e.v
        edges[eid] = Edge(u, v, e.length)
    return MetricGraph(verts, edges)


# -- sections -----------------------------------------------------------------


def choose_sections(g: MetricGraph) -> tuple[EdgePoint, ...]:
    """One section point per independent cycle, placed deterministically.

    A spanning tree is grown breadth-first from the smallest vertex id,
    taking edges in increasing id order; each of the beta non-tree edges
    receives a section point at its midpoint.
    """
    if not is_connected(g):
        raise Disconnects("sections need a connected graph")
    start = min(g.vertex_ids)
    visited = {start}
    queue = deque([start])
    tree: set[int] = set()
    while queue:
        u = queue.popleft()
        for eid, side in g.ends_at(u):
            e = g.edge(eid)
            w = e.v if side == 0 else e.u
            if w not in visited:
                visited.add(w)
                tree.add(eid)
                queue.append(w)
    non_tree = [eid for eid in g.edge_ids if eid not in tree]
    return tuple(EdgePoint(eid, 0.5 * g.edge(eid).length) for eid in non_tree)


def local_sections(g: MetricGraph, q: Partition) -> tuple[EdgePoint, ...]:
    """Section points adapted to a partition.

    Greedily, in increasing edge id order, each edge holding at least one
    partition point receives a section point at the midpoint of its longest
    point-free sub-segment, provided cutting at the sections chosen so far
    plus the candidate keeps the graph connected.  The number of points
    produced always equals betti(g) - betti(g cut at q).
    """
    if not is_connected(g):
        raise Disconnects("sections need a connected graph")
    target = betti(g) - betti(cut(g, q).graph)
    chosen: list[EdgePoint] = []
    for eid in g.edge_ids:
        xs = sorted(p.x for p in q.points if p.edge == eid)
        if not xs:
            continue
        L = g.edge(eid).length
        bounds = [0.0] + xs + [L]
        segs = [
            (bounds[i + 1] - bounds[i], bounds[i], bounds[i + 1])
            for i in range(len(bounds) - 1)
        ]
        segs.sort(key=lambda s: (-s[0], s[1]))
        for _, lo, hi in segs:
            cand = EdgePoint(eid, 0.5 * (lo + hi))
            trial = make_partition(g, chosen + [cand])
            if trial.proper and cut(g, trial).n_components == 1:
                chosen.append(cand)
                break
    if len(chosen) != target:
        raise ConsistencyError(
            f"local section count {len(chosen)} != cycle rank drop {target}"
        )
    return tuple(chosen)


def is_bipartite(
    g: MetricGraph, p: Partition
) -> tuple[bool, dict[int, int] | None]:
    """Two-color the components of the cut graph so neighbors across every
    partition point alternate.

    Returns (True, labels) with labels mapping component index to +1/-1,
    or (False, None) when some cycle carries an odd number of points.
    """
    res = cut(g, p)
    adj: dict[int, list[int]] = {i: [] for i in range(res.n_components)}
    for vm, vp in res.pairs:
        a = res.vertex_component[vm]
        b = res.vertex_component[vp]
        if a == b:
            return False, None
        adj[a].append(b)
        adj[b].append(a)
    color: dict[int, int] = {}
    for seed in range(res.n_components):
        if seed in color:
            continue
        color[seed] = 1
        queue = deque([seed])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in color:
                    color[w] = -color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return False, None
    return True, color


# -- the split graph of the equipartition map ---------------------------------


@dataclass(frozen=True)
class RobinPair:
    """Bookkeeping for one section after splitting: the two new vertices and
    the angle applied there."""

    minus: int
    plus: int
    phi: float


class SplitGraph:
    """A graph cut at section points with paired Robin conditions installed.

    At section i with angle phi_i the smaller-coordinate vertex v_minus gets
    strength -tan(phi_i/2) and v_plus gets +tan(phi_i/2); phi_i = pi makes
    both ends Dirichlet.
    """

    def __init__(self, graph: MetricGraph, pairs: tuple[RobinPair, ...], cut_result: CutResult):
        self.graph = graph
        self.pairs = pairs
        self.cut_result = cut_result

    @property
    def edge_map(self) -> EdgeMap:
        return self.cut_result.edge_map


def build_robin_tree(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    phi: Sequence[float],
) -> SplitGraph:
    """Split the graph at the section points and install the paired angle
    conditions.  Requires the cut graph to stay connected."""
    if len(sections) != len(phi):
        raise InvalidGraph("one angle per section required")
    part = make_partition(g, sections)
    res = cut(g, part)
    if res.n_components != 1:
        raise Disconnects("cutting at sections disconnected the graph")
    graph = res.graph
    verts = {v: c for v, c in graph.vertices()}
    pairs = []
    for (vm, vp), a in zip(res.pairs, phi):
        a = wrap_angle(float(a))
        if a == math.pi:
            verts[vm] = VertexCondition.dirichlet()
            verts[vp] = VertexCondition.dirichlet()
        else:
            verts[vm] = VertexCondition(wrap_angle(-a))
            verts[vp] = VertexCondition(a)
        pairs.append(RobinPair(vm, vp, a))
    out = MetricGraph(verts, {eid: e for eid, e in graph.edges()})
    return SplitGraph(out, tuple(pairs), res)
