"""Exception taxonomy shared by all qgraph modules.

Every error raised on a documented failure path derives from QGraphError,
so callers (and the CLI) can distinguish bad input, geometry violations and
numerical breakdown without string matching.
"""


class QGraphError(Exception):
    """Base class for all qgraph errors."""


class InvalidGraph(QGraphError):
    """The graph data violates a structural invariant (bad length, missing
    endpoint, isolated vertex)."""


class ParseError(QGraphError):
    """A graph text file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ImproperPartition(QGraphError):
    """A partition point sits on a vertex or two points coincide."""


class DirichletGlue(QGraphError):
    """Attempted to glue a Dirichlet vertex; coupling strengths do not add."""


class Disconnects(QGraphError):
    """Cutting at the given points disconnects a graph that must stay
    connected."""


class BracketFailure(QGraphError):
    """Root bracketing exhausted its refinement budget with a counting
    deficit; eigenvalues are probably missing."""


class DegenerateEigenvalue(QGraphError):
    """The requested operation needs a simple eigenvalue but the rank test
    reports multiplicity above one."""


class IdenticallyZeroEdge(QGraphError):
    """An eigenfunction vanishes identically on an edge; nodal data on that
    edge is undefined."""


class ImproperEigenfunction(QGraphError):
    """The eigenfunction vanishes at a vertex (or is degenerate), so nodal
    counting rules do not apply."""


class OutsideDomain(QGraphError):
    """The angle vector lies outside the domain of the equipartition map:
    the selected eigenfunction vanishes at a non-Dirichlet vertex or the
    eigenvalue fails to be simple."""


class NotEquipartition(QGraphError):
    """The partition's component ground energies are not all equal."""


class SectionOnZero(QGraphError):
    """Both the value and the derivative of a component ground state vanish
    at a section point; the angle there is undefined."""


class LeftNeighborhood(QGraphError):
    """A locally parameterized partition changed its per-edge zero pattern,
    so it left the neighborhood where the local map is valid."""


class NoConvergence(QGraphError):
    """An iterative search exhausted its iteration budget."""


class LeftDomain(QGraphError):
    """An iterative search could not keep its iterates inside the domain."""


class UnsupportedBeta(QGraphError):
    """The operation is only implemented for first Betti number at most
    two."""


class ConsistencyError(QGraphError):
    """Two independently computed quantities that must agree exactly (up to
    stated tolerance) disagree; indicates a solver failure, not bad input."""
