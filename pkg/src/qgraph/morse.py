"""Critical-point analysis of the partition energy on the torus of angles.

The energy of the torus map has an analytic gradient: at section j with
angle phi_j, the derivative is read off the boundary values of the
normalized relevant eigenfunction f of the split graph,

    (f(v_j+)^2 - f(v_j-)^2) / (2 cos^2(phi_j / 2)),

with the equivalent derivative form
(f'(v_j+)^2 - f'(v_j-)^2) / (2 sin^2(phi_j / 2)) taking over near
phi_j = pi where the value form degenerates.

Zeros of proper eigenfunctions of the original graph are critical points
of the energy, and at nondegenerate ones the Morse index equals the nodal
deficiency n - nu_n.  verify_theorem runs that pipeline end to end;
mixed_minimax_check extracts the min/max signature sigma of the nested
one-dimensional optimizations and checks its bookkeeping against both the
eigenvalue index and the Morse index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConsistencyError,
    DegenerateEigenvalue,
    ImproperEigenfunction,
    LeftDomain,
    NoConvergence,
    NotEquipartition,
    OutsideDomain,
    UnsupportedBeta,
)
from .graph import (
    EdgePoint,
    MetricGraph,
    Partition,
    betti,
    build_robin_tree,
    cut,
    is_bipartite,
)
from .partition import (
    TorusPoint,
    as_torus_point,
    component_energies,
    lambda_phi,
    local_angles,
    _component_ground_states,
    _pi_count,
    _spread_ok,
)
from .spectral import (
    EigenPair,
    eigenfunction,
    eigenvalues,
    nodal_counts,
    zeros,
)

log = logging.getLogger(__name__)

GRAD_TOL = 1e-9
CRITICAL_GRAD_TOL = 1e-8
INDEX_TOL = 1e-4


def _end_data(g: MetricGraph, f: EigenPair, vid: int) -> tuple[float, float]:
    """Value and (orientation-dependent) derivative of f at a vertex; only
    even powers of the derivative are ever used."""
    eid, side = g.ends_at(vid)[0]
    x = 0.0 if side == 0 else g.edge(eid).length
    p = EdgePoint(eid, x)
    return f.value(p), f.derivative(p)


def grad_lambda(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    phi,
    m: int,
) -> np.ndarray:
    """Analytic gradient of the partition energy at a torus point.

    Component j uses the value form away from phi_j = pi and the
    derivative form within |cos(phi_j/2)| < 1e-3 of it.
    """
    tp = as_torus_point(phi)
    if len(tp) != len(sections):
        raise OutsideDomain("one angle per section required")
    index = m + 1 - _pi_count(tp)
    if index < 1:
        raise OutsideDomain(f"partition size {m} too small")
    split = build_robin_tree(g, sections, tp.phi)
    pairs = eigenvalues(split.graph, count=index)
    top = pairs[index - 1]
    if top.multiplicity != 1:
        raise OutsideDomain(
            f"relevant eigenvalue {top.lam:.9g} is degenerate"
        )
    f = eigenfunction(split.graph, top)
    out = np.empty(len(tp))
    for j, rp in enumerate(split.pairs):
        c = math.cos(0.5 * rp.phi)
        vm_val, vm_der = _end_data(split.graph, f, rp.minus)
        vp_val, vp_der = _end_data(split.graph, f, rp.plus)
        if abs(c) < 1e-3:
            s = math.sin(0.5 * rp.phi)
            out[j] = (vp_der**2 - vm_der**2) / (2.0 * s * s)
        else:
            out[j] = (vp_val**2 - vm_val**2) / (2.0 * c * c)
    return out


def find_critical(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    seed,
    m: int,
    tol: float = GRAD_TOL,
    max_iter: int = 60,
) -> TorusPoint:
    """Damped Newton iteration on the gradient, starting from seed.

    The Jacobian comes from forward differences of the analytic gradient;
    steps are capped at 0.3 rad per angle and halved while they leave the
    domain or fail to shrink the gradient.
    """
    tp = as_torus_point(seed)
    k = len(tp)
    if k == 0:
        return tp
    try:
        grad = grad_lambda(g, sections, tp, m)
    except OutsideDomain as exc:
        raise LeftDomain(f"seed outside the domain: {exc}") from exc
    for it in range(max_iter):
        gn = float(np.linalg.norm(grad))
        if gn <= tol:
            log.debug("find_critical: seed %s converged in %d iterations", seed, it)
            return tp
        h = 1e-6
        J = np.empty((k, k))
        for j in range(k):
            gj = grad_lambda(g, sections, tp.perturbed(j, h), m)
            J[:, j] = (gj - grad) / h
        try:
            step = np.linalg.solve(J, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        cap = 0.3
        biggest = float(np.max(np.abs(step)))
        if biggest > cap:
            step *= cap / biggest
        t = 1.0
        accepted = False
        left = 0
        for _ in range(30):
            cand = TorusPoint(
                tuple(a + t * float(d) for a, d in zip(tp.phi, step))
            )
            try:
                g2 = grad_lambda(g, sections, cand, m)
            except OutsideDomain:
                left += 1
                t *= 0.5
                continue
            if float(np.linalg.norm(g2)) < gn or float(
                np.linalg.norm(g2)
            ) <= tol:
                tp, grad = cand, g2
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if left >= 30:
                raise LeftDomain("every damped step leaves the domain")
            raise NoConvergence(
                f"gradient stalled at {gn:.3g} after {it} iterations"
            )
    raise NoConvergence(f"no convergence in {max_iter} iterations")


@dataclass(frozen=True, eq=False)
class HessianEstimate:
    """Richardson-extrapolated Hessian with its two raw estimates.

    discrepancy is the largest entrywise difference between the h and h/2
    estimates relative to the matrix scale; it bounds the trustworthiness
    of near-zero eigenvalues.
    """

    matrix: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    discrepancy: float
    step: float


def hessian(
    g: MetricGraph,
    sections: Sequence[EdgePoint],
    phi_star,
    m: int,
    h: float = 1e-4,
) -> HessianEstimate:
    """Central differences of the analytic gradient at steps h and h/2,
    symmetrized and Richardson extrapolated."""
    tp = as_torus_point(phi_star)
    k = len(tp)

    def estimate(step: float) -> np.ndarray:
        H = np.empty((k, k))
        for j in range(k):
            gp = grad_lambda(g, sections, tp.perturbed(j, step), m)
            gm = grad_lambda(g, sections, tp.perturbed(j, -step), m)
            H[:, j] = (gp - gm) / (2.0 * step)
        return 0.5 * (H + H.T)

    coarse = estimate(h)
    fine = estimate(0.5 * h)
    matrix = (4.0 * fine - coarse) / 3.0
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    discrepancy = float(np.max(np.abs(fine - coarse))) / scale
    return HessianEstimate(
        matrix=matrix, coarse=coarse, fine=fine, discrepancy=discrepancy, step=h
    )


def morse_index(hess, tol: float = INDEX_TOL) -> tuple[int, bool]:
    """Number of negative eigenvalues of a symmetric matrix, plus a
    nondegeneracy flag; eigenvalues within tol * scale of zero are treated
    as zero and make the point degenerate."""
    H = np.asarray(hess, dtype=float)
    if H.size == 0:
        return 0, True
    evals = np.linalg.eigvalsh(H)
    scale = float(np.max(np.abs(evals)))
    cutoff = tol * scale
    index = int(np.sum(evals < -cutoff))
    nondegenerate = bool(np.all(np.abs(evals) > cutoff))
    return index, nondegenerate


@dataclass(frozen=True, eq=False)
class MorseReport:
    """Outcome of checking index-equals-deficiency at one eigenfunction."""

    n: int
    lam: float
    mu: int
    nu: int
    deficiency: int
    phi_star: TorusPoint
    grad_norm: float
    hessian: np.ndarray | None
    hessian_discrepancy: float | None
    morse_index: int
    nondegenerate: bool
    verdict: str  # "pass" | "fail" | "withheld"


def verify_theorem(
    g: MetricGraph,
    n: int,
    grad_tol: float = CRITICAL_GRAD_TOL,
    fd_step: float = 1e-4,
) -> MorseReport:
    """Check that the nodal deficiency of the n-th eigenfunction equals the
    Morse index of the partition energy at its zero set.

    The zero set gives the critical angles through the local inverse map;
    the gradient there must vanish; the verdict compares the Hessian index
    with n - nu_n and is withheld at degenerate critical points.
    """
    pairs = eigenvalues(g, count=n)
    top = pairs[n - 1]
    if top.multiplicity != 1:
        raise ImproperEigenfunction(
            f"eigenvalue {n} is degenerate (multiplicity {top.multiplicity})"
        )
    f = eigenfunction(g, top)
    mu, nu = nodal_counts(g, f)
    d = n - nu
    q0 = zeros(g, f)
    tp, sections = local_angles(g, q0)
    k = len(sections)
    if not 0 <= d <= k:
        raise ConsistencyError(
            f"deficiency {d} outside [0, {k}] at eigenfunction {n}"
        )
    if k == 0:
        return MorseReport(
            n=n,
            lam=top.lam,
            mu=mu,
            nu=nu,
            deficiency=d,
            phi_star=tp,
            grad_norm=0.0,
            hessian=None,
            hessian_discrepancy=None,
            morse_index=0,
            nondegenerate=True,
            verdict="pass" if d == 0 else "fail",
        )
    grad = grad_lambda(g, sections, tp, mu)
    gn = float(np.linalg.norm(grad))
    if gn > grad_tol:
        raise ConsistencyError(
            f"gradient {gn:.3g} not zero at eigenfunction zeros (n={n})"
        )
    est = hessian(g, sections, tp, mu, h=fd_step)
    idx, nondeg = morse_index(est.matrix)
    if not nondeg:
        verdict = "withheld"
    else:
        verdict = "pass" if idx == d else "fail"
    return MorseReport(
        n=n,
        lam=top.lam,
        mu=mu,
        nu=nu,
        deficiency=d,
        phi_star=tp,
        grad_norm=gn,
        hessian=est.matrix,
        hessian_discrepancy=est.discrepancy,
        morse_index=idx,
        nondegenerate=nondeg,
        verdict=verdict,
    )


def mixed_minimax_check(g: MetricGraph, n: int, grid: int = 64) -> list[int]:
    """Extract the min/max signature of the nested angle optimizations at
    the n-th eigenfunction and verify its bookkeeping.

    Peeling the innermost angle at index r replaces the optimization by the
    glued graph's eigenvalue at r (a maximum, sigma = 0) or r - 1 (a
    minimum, sigma = 1); which one is decided by matching the eigenvalue
    against the two glued endpoints, and a full-circle grid confirms the
    one-dimensional eigenvalue branch stays inside that bracket.  Afterward
    sum(sigma) must equal mu + 1 - n and the Morse index must equal
    k - sum(sigma) wherever the Hessian is nondegenerate.
    """
    if betti(g) > 2:
        raise UnsupportedBeta("exhaustive angle grids only at cycle rank <= 2")
    pairs = eigenvalues(g, count=n)
    top = pairs[n - 1]
    if top.multiplicity != 1:
        raise ImproperEigenfunction(f"eigenvalue {n} is degenerate")
    f = eigenfunction(g, top)
    mu, _nu = nodal_counts(g, f)
    q0 = zeros(g, f)
    tp, sections = local_angles(g, q0)
    k = len(sections)
    lam_ref = top.lam
    tol = 1e-8 * max(1.0, abs(lam_ref))
    sigma: list[int] = [0] * k
    r = mu + 1
    for j in range(k, 0, -1):
        if j >= 2:
            glued = build_robin_tree(
                g, sections[: j - 1], tp.phi[: j - 1]
            ).graph
        else:
            glued = g
        gl = eigenvalues(glued, count=r)
        lam_hi = gl[r - 1].lam
        lam_lo = gl[r - 2].lam if r >= 2 else -math.inf
        match_hi = abs(lam_ref - lam_hi) <= tol
        match_lo = abs(lam_ref - lam_lo) <= tol
        if match_hi and match_lo:
            raise DegenerateEigenvalue(
                f"glued endpoints coincide at level {j}"
            )
        if not (match_hi or match_lo):
            raise ConsistencyError(
                f"eigenvalue matches neither glued endpoint at level {j}: "
                f"{lam_lo:.12g} / {lam_ref:.12g} / {lam_hi:.12g}"
            )
        sigma[j - 1] = 0 if match_hi else 1
        # one-dimensional branch stays inside the glued bracket
        sweep_tol = 1e-7 * max(1.0, abs(lam_ref))
        for i in range(grid):
            a = -math.pi + 2.0 * math.pi * (i + 1) / grid
            angles = tp.phi[: j - 1] + (a,)
            val = lambda_phi(g, sections[:j], angles, r - 1)
            if val > lam_hi + sweep_tol or val < lam_lo - sweep_tol:
                raise ConsistencyError(
                    f"angle sweep leaves the glued bracket at level {j}"
                )
        r -= sigma[j - 1]
    total = sum(sigma)
    if total != mu + 1 - n:
        raise ConsistencyError(
            f"signature sum {total} != mu + 1 - n = {mu + 1 - n}"
        )
    if k > 0:
        est = hessian(g, sections, tp, mu)
        idx, nondeg = morse_index(est.matrix)
        if nondeg and idx != k - total:
            raise ConsistencyError(
                f"Morse index {idx} != k - sum(sigma) = {k - total}"
            )
    return sigma


@dataclass(frozen=True)
class DeficiencyHistogram:
    """Counts of the nodal deficiency over a range of eigenfunctions,
    with the binomial reference suggested by the deficiency's observed
    statistics (a conjecture, never asserted)."""

    beta: int
    counts: dict[int, int]
    skipped: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def frequency(self, d: int) -> float:
        if self.total == 0:
            return 0.0
        return self.counts.get(d, 0) / self.total

    def binomial_reference(self, d: int) -> float:
        return math.comb(self.beta, d) / 2.0**self.beta


def deficiency_histogram(g: MetricGraph, n_range) -> DeficiencyHistogram:
    """Tabulate n - nu_n over the proper eigenfunctions with n in n_range;
    improper or degenerate indices are skipped and reported."""
    ns = sorted(set(int(n) for n in n_range))
    if not ns or ns[0] < 1:
        raise ConsistencyError("eigenvalue indices start at 1")
    beta = betti(g)
    pairs = eigenvalues(g, count=ns[-1])
    counts: dict[int, int] = {d: 0 for d in range(beta + 1)}
    skipped: list[int] = []
    for n in ns:
        top = pairs[n - 1]
        if top.multiplicity != 1:
            skipped.append(n)
            continue
        try:
            f = eigenfunction(g, top)
            _mu, nu = nodal_counts(g, f)
        except ImproperEigenfunction:
            skipped.append(n)
            continue
        d = n - nu
        if not 0 <= d <= beta:
            raise ConsistencyError(f"deficiency {d} out of range at n={n}")
        counts[d] += 1
    return DeficiencyHistogram(
        beta=beta, counts=counts, skipped=tuple(skipped)
    )


# -- reconstruction of an eigenfunction from a bipartite critical partition ----


def reconstruct_eigenvalue(g: MetricGraph, q: Partition) -> tuple[float, float]:
    """Glue the component ground states of a bipartite equipartition into a
    single function, matching one-sided derivatives across every partition
    point; returns the common energy and the largest relative matching
    mismatch.

    A small mismatch certifies that the partition energy is attained by an
    actual eigenfunction of the graph.
    """
    bip, _colors = is_bipartite(g, q)
    if not bip:
        raise NotEquipartition("reconstruction needs a bipartite partition")
    res = cut(g, q)
    subs, states = _component_ground_states(res)
    energies = tuple(f.lam for f in states)
    if not _spread_ok(energies, 1e-6):
        raise NotEquipartition("component ground energies differ")
    lam = sum(energies) / len(energies)

    def end_deriv(vid: int) -> tuple[float, int]:
        comp = res.vertex_component[vid]
        eid, side = res.graph.ends_at(vid)[0]
        x = 0.0 if side == 0 else res.graph.edge(eid).length
        return states[comp].derivative(EdgePoint(eid, x)), comp

    # spread scale factors over the component adjacency graph
    factor: dict[int, float] = {}
    mismatch = 0.0
    links = []
    for vm, vp in res.pairs:
        dm, ca = end_deriv(vm)
        dp, cb = end_deriv(vp)
        links.append((ca, cb, dm, dp))
    factor[0] = 1.0
    changed = True
    while changed:
        changed = False
        for ca, cb, dm, dp in links:
            if ca in factor and cb not in factor:
                factor[cb] = factor[ca] * dm / dp
                changed = True
            elif cb in factor and ca not in factor:
                factor[ca] = factor[cb] * dp / dm
                changed = True
    if len(factor) != len(states):
        raise ConsistencyError("partition components do not chain together")
    for ca, cb, dm, dp in links:
        lhs = factor[ca] * dm
        rhs = factor[cb] * dp
        scale = max(abs(lhs), abs(rhs), 1e-300)
        mismatch = max(mismatch, abs(lhs - rhs) / scale)
    return lam, mismatch
