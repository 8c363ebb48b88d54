"""The partition energy and its torus parameterization.

A proper partition cuts the graph into components; its energy is the
largest ground energy among them.  Partitions whose components all share
one ground energy (equipartitions) are exactly the images of a map from a
torus of angles: cut the graph at one section point per independent cycle,
install paired Robin conditions with strength +-tan(phi_j / 2) at the two
new vertices, and pull the zero set of a fixed-index eigenfunction of the
split graph back to the original edges.  An angle of pi makes both section
vertices Dirichlet and contributes the section point itself to the
partition, with the eigenfunction index dropping by one per such angle.

The inverse map reads each angle off the boundary data of the component
ground states at the section point: phi_j = 2 * atan2(f'(v_j), f(v_j)).

A local variant parameterizes the equipartitions near a given one by
angles at sections adapted to that partition; it keeps the number of
partition points on every edge and reports LeftNeighborhood when a
perturbation walks out of that regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import (
    ConsistencyError,
    IdenticallyZeroEdge,
    ImproperPartition,
    InvalidGraph,
    LeftNeighborhood,
    NotEquipartition,
    OutsideDomain,
    SectionOnZero,
)
from .graph import (
    CutResult,
    EdgePoint,
    MetricGraph,
    Partition,
    SplitGraph,
    betti,
    build_robin_tree,
    cut,
    local_sections,
    make_partition,
    wrap_angle,
)
from .spectral import (
    EigenPair,
    eigenfunction,
    eigenvalues,
    is_proper,
    sup_norm,
    zeros,
)

EQUIPARTITION_TOL = 1e-8
VERTEX_TOL = 1e-9


@dataclass(frozen=True)
class TorusPoint:
    """A point on the torus of section angles, each in (-pi, pi]."""

    phi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "phi", tuple(wrap_angle(float(a)) for a in self.phi)
        )

    def __len__(self) -> int:
        return len(self.phi)

    def __iter__(self):
        return iter(self.phi)

    def __getitem__(self, j: int) -> float:
        return self.phi[j]

    def replace(self, j: int, value: float) -> "TorusPoint":
        phi = list(self.phi)
        phi[j] = value
        return TorusPoint(tuple(phi))

    def perturbed(self, j: int, dphi: float) -> "TorusPoint":
        return self.replace(j, self.phi[j] + dphi)

    def distance(self, other: "TorusPoint") -> float:
        """Largest circular distance between matching angles."""
        if len(self) != len(other):
            raise InvalidGraph("torus points of different dimension")
        if not self.phi:
            return 0.0
        return max(
            abs(wrap_angle(a - b)) for a, b in zip(self.phi, other.phi)
        )


def as_torus_point(phi) -> TorusPoint:
    if isinstance(phi, TorusPoint):
        return phi
    return TorusPoint(tuple(float(a) for a in phi))


@dataclass(frozen=True)
class EquipartitionRecord:
    """An equipartition together with the data that produced it.

    lam is the partition energy; eigen is the split-graph eigenfunction
    whose zeros were pulled back (None in the zero-dimensional local case);
    components lists the ground energies of the cut components.
    """

    q: Partition
    phi: TorusPoint
    m: int
    lam: float
    eigen: EigenPair | None
    components: tuple[float, ...]
    sections: tuple[EdgePoint, ...]


# -- the energy functional -----------------------------------------------------


def component_energies(g: MetricGraph, p: Partition) -> tuple[float, ...]:
    """Ground energy of every component of the graph cut at p, in component
    order."""
    res = cut(g, p)
    return tuple(
        eigenvalues(sub, count=1)[0].lam for sub in res.subgraphs()
    )


def lambda_of_partition(g: MetricGraph, p: Partition) -> float:
    """The partition energy: the largest component ground energy."""
    return max(component_energies(g, p))


def is_equipartition(
    g: MetricGraph, p: Partition, tol: float = EQUIPARTITION_TOL
) -> bool:
    """All component ground energies agree to relative tol."""
    energies = component_energies(g, p)
    return _spread_ok(energies, tol)


def _spread_ok(energies: Sequence[float], tol: float) -> bool:
    mean = sum(energies) / len(energies)
    scale = max(abs(mean), 1e-3)
    return max(energies) - min(energies) <= tol * scale


@lru_cache(maxsize=None)
def minimal_m(g: MetricGraph) -> int:
    """Smallest N such that the (N - beta + 1)-th eigenvalue reaches the
    largest single-edge Dirichlet ground energy.  For every partition size
    above N the torus map is guaranteed to place a point on every edge."""
    beta = betti(g)
    lam_d = max((math.pi / e.length) ** 2 for _, e in g.edges())
    count = 16
    while True:
        pairs = eigenvalues(g, count=count)
        for j, pair in enumerate(pairs, start=1):
            if pair.lam >= lam_d * (1.0 - 1e-12):
                return j + beta - 1
        count *= 2
        if count > 65536:
            raise ConsistencyError("eigenvalues never reach the edge bound")


# -- the torus map -------------------------------------------------------------


def _pi_count(tp: TorusPoint) -> int:
    return sum(1 for a in tp.phi if a == math.pi)


def _split_eigenfunction(
    split: SplitGraph, index: int
) -> tuple[EigenPair, Partition]:
    """Simple proper eigenfunction of the split graph at a 1-based index,
    with its interior zero set; OutsideDomain where the torus map is
    undefined."""
    pairs = eigenvalues(split.graph, count=index)
    top = pairs[index - 1]
    if top.multiplicity != 1:
        raise OutsideDomain(
            f"eigenvalue {top.lam:.9g} of the split graph is degenerate"
        )
    f = eigenfunction(split.graph, top)
    if not is_proper(split.graph, f):
        raise OutsideDomain("eigenfunction vanishes at a vertex")
    try:
        z = zeros(split.graph, f, vertex_tol=VERTEX_TOL)
    except IdenticallyZeroEdge as exc:
        raise OutsideDomain(str(exc)) from exc
    if not z.proper:
        raise OutsideDomain("zero set touches a section or vertex")
    return f, z


def _pull_back(
    g: MetricGraph,
    split: SplitGraph,
    z: Partition,
    sections: Sequence[EdgePoint],
    tp: TorusPoint,
) -> Partition:
    pts = [split.edge_map.to_original(p) for p in z.points]
    pts.extend(s for s, a in zip(sections, tp.phi) if a == math.pi)
    q = make_partition(g, pts, vertex_tol=VERTEX_TOL)
    if not q.proper:
        raise OutsideDomain("pulled-back partition touches a vertex")
    return q


def _checked_record(
    g: MetricGraph,
    q: Partition,
    tp: TorusPoint,
    m: int,
    f: EigenPair,
    sections: Sequence[EdgePoint],
) -> EquipartitionRecord:
    if q.mu != m:
        raise ConsistencyError(
            f"zero count {q.mu} differs from partition size {m}"
        )
    energies = component_energies(g, q)
    if not _spread_ok(energies, EQUIPARTITION_TOL):
        raise ConsistencyError("pulled-back partition is not an equipartition")
    lam = max(energies)
    if abs(lam - f.lam) > EQUIPARTITION_TOL * max(1.0, abs(f.lam)):
        raise ConsistencyError(
            f"partition energy {lam:.12g} != split eigenvalue {f.lam:.12g}"
        )
    return EquipartitionRecord(
        q=q,
        phi=tp,
        m=m,
        lam=f.lam,
        eigen=f,
        components=energies,
        sections=tuple(sections),
    )


def phi_map(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    phi,
    m: int,
) -> EquipartitionRecord:
    """Map a torus point to the equipartition of size m it parameterizes.

    The split graph is cut at every section; with p angles equal to pi the
    relevant eigenfunction sits at index m + 1 - p and contributes m - p
    interior zeros, the remaining p points being the pi-sections
    themselves.  Raises OutsideDomain off the domain of the map.
    """
    tp = as_torus_point(phi)
    if len(tp) != len(sections):
        raise InvalidGraph("one angle per section required")
    p = _pi_count(tp)
    index = m + 1 - p
    if index < 1:
        raise OutsideDomain(f"partition size {m} too small for {p} pi-angles")
    split = build_robin_tree(g, sections, tp.phi)
    f, z = _split_eigenfunction(split, index)
    q = _pull_back(g, split, z, sections, tp)
    return _checked_record(g, q, tp, m, f, sections)


def lambda_phi(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    phi,
    m: int,
) -> float:
    """Partition energy as a function of the angles alone: the relevant
    eigenvalue of the split graph, skipping zero-set pull-back."""
    tp = as_torus_point(phi)
    if len(tp) != len(sections):
        raise InvalidGraph("one angle per section required")
    index = m + 1 - _pi_count(tp)
    if index < 1:
        raise OutsideDomain(f"partition size {m} too small")
    split = build_robin_tree(g, sections, tp.phi)
    return eigenvalues(split.graph, count=index)[index - 1].lam


# -- the inverse map -----------------------------------------------------------


def _component_ground_states(
    res: CutResult,
) -> tuple[list[MetricGraph], list[EigenPair]]:
    subs = res.subgraphs()
    states = []
    for sub in subs:
        pair = eigenvalues(sub, count=1)[0]
        if not pair.simple:
            raise ConsistencyError("component ground state is degenerate")
        states.append(eigenfunction(sub, pair))
    return subs, states


def _angle_at(
    res: CutResult, states: list[EigenPair], subs: list[MetricGraph], s: EdgePoint
) -> float:
    loc = res.edge_map.locate(s)
    if loc.at_cut:
        return math.pi
    comp = res.component_of_edge(loc.edge)
    f = states[comp]
    here = EdgePoint(loc.edge, loc.x)
    val = f.value(here)
    der = f.derivative(here)
    if math.hypot(val, der) <= 1e-13 * sup_norm(subs[comp], f):
        raise SectionOnZero(f"ground state vanishes to first order at {s}")
    return wrap_angle(2.0 * math.atan2(der, val))


def phi_inverse(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    q: Partition,
) -> TorusPoint:
    """Angles whose torus image is the given equipartition.

    Each angle is read off the boundary data of the component ground state
    at its section point; a section point lying in q itself reads pi.
    Requires cutting at q to kill every cycle.
    """
    if not q.proper:
        raise ImproperPartition("cannot invert an improper partition")
    res = cut(g, q)
    if betti(res.graph) != 0:
        raise InvalidGraph("partition leaves a cycle uncut; use the local map")
    subs, states = _component_ground_states(res)
    if not _spread_ok(tuple(f.lam for f in states), EQUIPARTITION_TOL):
        raise NotEquipartition("component ground energies differ")
    return TorusPoint(
        tuple(_angle_at(res, states, subs, s) for s in sections)
    )


def local_angles(
    g: MetricGraph, q: Partition
) -> tuple[TorusPoint, tuple[EdgePoint, ...]]:
    """Sections adapted to a partition and the angles read there.

    The local counterpart of phi_inverse: works for partitions that leave
    some cycles uncut, producing one angle per cycle actually cut by q.
    """
    if not q.proper:
        raise ImproperPartition("cannot invert an improper partition")
    sections = local_sections(g, q)
    res = cut(g, q)
    subs, states = _component_ground_states(res)
    if not _spread_ok(tuple(f.lam for f in states), EQUIPARTITION_TOL):
        raise NotEquipartition("component ground energies differ")
    tp = TorusPoint(tuple(_angle_at(res, states, subs, s) for s in sections))
    return tp, sections


def phi_map_local(
    g: MetricGraph,
    q0: Partition,
    phi,
) -> EquipartitionRecord:
    """Torus map restricted to the neighborhood of a given equipartition.

    Sections are adapted to q0 and the angle count equals the number of
    cycles q0 cuts.  The image must keep the same number of partition
    points on every edge as q0; LeftNeighborhood otherwise.  With no
    cut cycles the equipartition is isolated and returned as is.
    """
    if not q0.proper:
        raise ImproperPartition("base partition must be proper")
    tp = as_torus_point(phi)
    sections = local_sections(g, q0)
    if len(tp) != len(sections):
        raise InvalidGraph(
            f"expected {len(sections)} angles, got {len(tp)}"
        )
    m = q0.mu
    if not sections:
        energies = component_energies(g, q0)
        if not _spread_ok(energies, EQUIPARTITION_TOL):
            raise NotEquipartition("base partition is not an equipartition")
        return EquipartitionRecord(
            q=q0,
            phi=tp,
            m=m,
            lam=max(energies),
            eigen=None,
            components=energies,
            sections=(),
        )
    p = _pi_count(tp)
    index = m + 1 - p
    if index < 1:
        raise OutsideDomain(f"partition size {m} too small for {p} pi-angles")
    split = build_robin_tree(g, sections, tp.phi)
    f, z = _split_eigenfunction(split, index)
    q = _pull_back(g, split, z, sections, tp)
    for eid in g.edge_ids:
        if len(q.on_edge(eid)) != len(q0.on_edge(eid)):
            raise LeftNeighborhood(
                f"zero pattern changed on edge {eid}"
            )
    return _checked_record(g, q, tp, m, f, sections)
