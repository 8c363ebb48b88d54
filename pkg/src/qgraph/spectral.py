"""Spectrum of -d^2/dx^2 on a metric graph via the secular equation.

On every edge a solution of -f'' = lam * f is a combination

    f_e(x) = A_e * S(lam, x) + B_e * C(lam, x)

of the normalized basis S (S(0) = 0, S'(0) = 1) and C (C(0) = 1,
C'(0) = 0).  Both are entire in lam: for lam > 0 they are sin(kx)/k and
cos(kx) with lam = k^2, for lam < 0 they are sinh(kx)/k with k = sqrt(-lam)
(the kappa branch) and cosh, and at lam = 0 they degenerate to x and 1.
Collecting the continuity and coupling conditions of every vertex gives a
square linear system M(lam) in the coefficients (A_e, B_e); lam is an
eigenvalue exactly when M(lam) is singular, and the eigenspace dimension
equals the rank deficiency.

The secular value used for root scanning is the determinant of M(lam) with
every row scaled to unit norm.  Rows never vanish, so the scaled value is a
smooth, sign-carrying function of the spectral parameter, bounded by one in
magnitude and free of spurious poles; its zeros are exactly the eigenvalues.
Roots are found by sign-change bracketing on a k grid plus bisection, with
a second pass that polishes local minima of the magnitude to catch zeros of
even order.  Completeness of the positive branch is audited against the
asymptotic count (total length) * k / pi; a persistent deficit after grid
refinement raises BracketFailure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    BracketFailure,
    ConsistencyError,
    DegenerateEigenvalue,
    IdenticallyZeroEdge,
    ImproperEigenfunction,
    InvalidGraph,
)
from .graph import (
    EdgePoint,
    MetricGraph,
    Partition,
    betti,
    cut,
    is_connected,
    make_partition,
)

RANK_RTOL = 1e-8          # singular values below RANK_RTOL * s_max count as zero
VERTEX_ZERO_RTOL = 1e-9   # |f(v)| below this times sup|f| is a vertex zero
ACCEPT_SIGMA = 1e-6       # acceptance threshold for even-order root candidates
DEFAULT_TOL = 1e-12
ROW_SMOOTHING = 1e-3      # keeps row scaling analytic where a row vanishes


# -- basis --------------------------------------------------------------------


def basis_sc(lam, L: float):
    """S(lam, L) and C(lam, L) for an array (or scalar) of lam values."""
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    y = lam * (L * L)
    S = np.empty_like(lam)
    C = np.empty_like(lam)
    small = np.abs(y) < 1e-8
    pos = (lam > 0.0) & ~small
    neg = ~pos & ~small
    if pos.any():
        k = np.sqrt(lam[pos])
        S[pos] = np.sin(k * L) / k
        C[pos] = np.cos(k * L)
    if neg.any():
        k = np.sqrt(-lam[neg])
        S[neg] = np.sinh(k * L) / k
        C[neg] = np.cosh(k * L)
    if small.any():
        ys = y[small]
        S[small] = L * (1.0 - ys / 6.0 + ys * ys / 120.0)
        C[small] = 1.0 - ys / 2.0 + ys * ys / 24.0
    if scalar:
        return float(S[0]), float(C[0])
    return S, C


def _sc_scalar(lam: float, x: float) -> tuple[float, float]:
    y = lam * x * x
    if abs(y) < 1e-8:
        return x * (1.0 - y / 6.0 + y * y / 120.0), 1.0 - y / 2.0 + y * y / 24.0
    if lam > 0.0:
        k = math.sqrt(lam)
        return math.sin(k * x) / k, math.cos(k * x)
    k = math.sqrt(-lam)
    return math.sinh(k * x) / k, math.cosh(k * x)


def _edge_integrals(lam: float, L: float) -> tuple[float, float, float]:
    """Integrals of S^2, S*C and C^2 over [0, L] in closed form."""
    S, C = _sc_scalar(lam, L)
    I_CC = 0.5 * (L + S * C)
    I_SC = 0.5 * S * S
    y = lam * L * L
    if abs(y) < 1e-4:
        I_SS = L**3 * (1.0 / 3.0 - y / 15.0 + 2.0 * y * y / 315.0 - y**3 / 2835.0)
    else:
        I_SS = (L - S * C) / (2.0 * lam)
    return I_SS, I_SC, I_CC


# -- the secular system -------------------------------------------------------


class SecularSystem:
    """Vertex-condition linear system of a graph, assembled for batches of
    spectral parameter values.

    Row layout (per vertex, vertices in id order): a Dirichlet vertex
    contributes one value row per incident edge end; any other vertex
    contributes degree-1 continuity rows plus one flux row
    sum of inward derivatives - alpha * f(v).
    """

    def __init__(self, g: MetricGraph):
        self.graph = g
        self.edge_order = list(g.edge_ids)
        self.edge_pos = {eid: i for i, eid in enumerate(self.edge_order)}
        self.lengths = np.array([g.edge(e).length for e in self.edge_order])
        self.size = 2 * len(self.edge_order)
        # terms: (row, col, c0, cS, cC, cLS, edge_pos)
        terms: list[tuple[int, int, float, float, float, float, int]] = []
        # the same functionals in the exponential edge basis
        # exp(i k x), exp(i k (L - x)), whose entries stay bounded on the
        # contours used for counting and on the whole negative branch:
        # (row, col, c_plain, c_E, c_ik, c_ikE, edge_pos) with E = e^{ikL}
        eterms: list[tuple[int, int, float, float, float, float, int]] = []
        row = 0

        def value_terms(r, eid, side, sign):
            p = self.edge_pos[eid]
            if side == 0:
                terms.append((r, 2 * p + 1, sign, 0.0, 0.0, 0.0, p))
                eterms.append((r, 2 * p, sign, 0.0, 0.0, 0.0, p))
                eterms.append((r, 2 * p + 1, 0.0, sign, 0.0, 0.0, p))
            else:
                terms.append((r, 2 * p, 0.0, sign, 0.0, 0.0, p))
                terms.append((r, 2 * p + 1, 0.0, 0.0, sign, 0.0, p))
                eterms.append((r, 2 * p, 0.0, sign, 0.0, 0.0, p))
                eterms.append((r, 2 * p + 1, sign, 0.0, 0.0, 0.0, p))

        def deriv_terms(r, eid, side, sign):
            # sign times the inward derivative at the given end
            p = self.edge_pos[eid]
            if side == 0:
                terms.append((r, 2 * p, sign, 0.0, 0.0, 0.0, p))
                eterms.append((r, 2 * p, 0.0, 0.0, sign, 0.0, p))
                eterms.append((r, 2 * p + 1, 0.0, 0.0, 0.0, -sign, p))
            else:
                terms.append((r, 2 * p, 0.0, 0.0, -sign, 0.0, p))
                terms.append((r, 2 * p + 1, 0.0, 0.0, 0.0, sign, p))
                eterms.append((r, 2 * p, 0.0, 0.0, 0.0, -sign, p))
                eterms.append((r, 2 * p + 1, 0.0, 0.0, sign, 0.0, p))

        for vid in g.vertex_ids:
            cond = g.condition(vid)
            ends = g.ends_at(vid)
            if cond.is_dirichlet:
                for eid, side in ends:
                    value_terms(row, eid, side, 1.0)
                    row += 1
            else:
                for (e1, s1), (e2, s2) in zip(ends, ends[1:]):
                    value_terms(row, e1, s1, 1.0)
                    value_terms(row, e2, s2, -1.0)
                    row += 1
                for eid, side in ends:
                    deriv_terms(row, eid, side, 1.0)
                value_terms(row, ends[0][0], ends[0][1], -cond.alpha)
                row += 1
        if row != self.size:
            raise ConsistencyError(f"assembled {row} rows for size {self.size}")
        self.terms = terms
        self.exp_terms = eterms
        self._m0: int | None = None

    def matrices(self, lams: np.ndarray) -> np.ndarray:
        """Row-normalized system matrices, shape (len(lams), 2E, 2E)."""
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        n = lams.shape[0]
        E = len(self.edge_order)
        S = np.empty((n, E))
        C = np.empty((n, E))
        for j, L in enumerate(self.lengths):
            S[:, j], C[:, j] = basis_sc(lams, float(L))
        M = np.zeros((n, self.size, self.size))
        for r, c, c0, cS, cC, cLS, p in self.terms:
            col = M[:, r, c]
            if c0:
                col += c0
            if cS:
                col += cS * S[:, p]
            if cC:
                col += cC * C[:, p]
            if cLS:
                col += cLS * lams * S[:, p]
        # A continuity row pairing the two sides of a loop vanishes at the
        # loop's resonances, where the constraint it encodes turns vacuous.
        # The smoothing keeps the scaling analytic through those points, so
        # the scaled determinant has a genuine zero there instead of a sign
        # jump, and the rank test sees the vacuous row as unconstraining.
        sq = np.sum(M * M, axis=2, keepdims=True)
        M /= np.sqrt(sq + ROW_SMOOTHING**2)
        return M

    def matrix(self, lam: float) -> np.ndarray:
        return self.matrices(np.array([lam]))[0]

    def values(self, lams: np.ndarray) -> np.ndarray:
        """Scaled secular determinant at each lam; zero exactly at
        eigenvalues, magnitude at most one."""
        M = self.matrices(lams)
        sign, logabs = np.linalg.slogdet(M)
        out = np.where(sign == 0.0, 0.0, sign * np.exp(logabs))
        return out

    def value(self, lam: float) -> float:
        return float(self.values(np.array([lam]))[0])

    def singular_values(self, lam: float) -> np.ndarray:
        return np.linalg.svd(self.matrix(lam), compute_uv=False)

    def null_vectors(self, lam: float, count: int = 1) -> np.ndarray:
        _, _, Vh = np.linalg.svd(self.matrix(lam))
        return Vh[-count:][::-1]

    def exp_matrices(self, ks: np.ndarray) -> np.ndarray:
        """Unscaled system matrices in the exponential edge basis at complex
        wavenumbers, shape (len(ks), 2E, 2E).

        Entire in k with entries bounded on horizontal strips, so contour
        evaluation and arbitrarily strong attractive couplings never
        overflow.  The determinant differs from the scaled one by a factor
        without zeros away from k = 0; both vanish exactly at eigenvalue
        wavenumbers, to the order of the multiplicity.
        """
        ks = np.atleast_1d(np.asarray(ks, dtype=complex))
        n = ks.shape[0]
        E = len(self.edge_order)
        EF = np.empty((n, E), dtype=complex)
        for j, L in enumerate(self.lengths):
            EF[:, j] = np.exp(1j * ks * float(L))
        ik = 1j * ks
        M = np.zeros((n, self.size, self.size), dtype=complex)
        for r, c, cp, cE, ci, ciE, p in self.exp_terms:
            col = M[:, r, c]
            if cp:
                col += cp
            if cE:
                col += cE * EF[:, p]
            if ci:
                col += ci * ik
            if ciE:
                col += ciE * ik * EF[:, p]
        return M

    def contour_signs(self, ks: np.ndarray) -> np.ndarray:
        """Unit-modulus determinant phases at complex wavenumbers; zero
        entries mark numerically singular points."""
        sign, _ = np.linalg.slogdet(self.exp_matrices(ks))
        return sign

    def neg_matrices(self, kappas: np.ndarray) -> np.ndarray:
        """Row-scaled real matrices along the negative branch, parameterized
        by the decay rate kappa (lam = -kappa**2); the exponential basis
        keeps them finite for any decay rate."""
        kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
        M = self.exp_matrices(1j * kappas).real
        sq = np.sum(M * M, axis=2, keepdims=True)
        M /= np.sqrt(sq + ROW_SMOOTHING**2)
        return M

    def neg_values(self, kappas: np.ndarray) -> np.ndarray:
        M = self.neg_matrices(kappas)
        sign, logabs = np.linalg.slogdet(M)
        return np.where(sign == 0.0, 0.0, sign * np.exp(logabs))

    def neg_singular_values(self, kappa: float) -> np.ndarray:
        M = self.neg_matrices(np.array([float(kappa)]))[0]
        return np.linalg.svd(M, compute_uv=False)

    def zero_rank_drop(self) -> int:
        """Rank deficiency of the system at lam = 0.

        An upper bound for the multiplicity of 0 as an eigenvalue: an
        eigenvalue merely close to 0 drops the rank there as well, so the
        bound is resolved against a winding count before it is reported
        (see eigenvalues)."""
        if self._m0 is None:
            sv = self.singular_values(0.0)
            self._m0 = int(np.sum(sv <= max(RANK_RTOL * sv[0], 1e-300)))
        return self._m0

    def origin_order(self) -> int:
        """Upper bound for the zero order of the exponential-basis
        determinant at k = 0: twice the lam = 0 multiplicity bound plus one
        per edge from the basis change."""
        return 2 * self.zero_rank_drop() + len(self.edge_order)


def secular_value(g: MetricGraph, lam: float) -> float:
    """Sign-carrying scaled secular determinant at spectral parameter lam."""
    return SecularSystem(g).value(lam)


# -- eigenpairs ---------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumQuery:
    """Exactly one of count (number of eigenvalues) or kmax (upper bound on
    the positive-branch wavenumber) must be set."""

    count: int | None = None
    kmax: float | None = None
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        if (self.count is None) == (self.kmax is None):
            raise InvalidGraph("set exactly one of count and kmax")
        if self.count is not None and self.count < 1:
            raise InvalidGraph("count must be at least 1")


@dataclass(frozen=True)
class EigenPair:
    """One eigenvalue with bookkeeping, 1-based index n.

    k is the scan parameter sqrt(|lam|): the wavenumber for lam > 0, the
    decay rate on the negative branch.  coefficients maps edge id to
    (A_e, B_e) in the S/C basis once the eigenfunction has been computed;
    entries of a degenerate cluster never get coefficients.
    """

    n: int
    lam: float
    k: float
    branch: str  # "neg" | "zero" | "pos"
    multiplicity: int
    simple: bool
    coefficients: dict[int, tuple[float, float]] | None = None
    normalized: bool = False
    residual: float | None = None

    def value(self, p: EdgePoint) -> float:
        A, B = self._ab(p.edge)
        S, C = _sc_scalar(self.lam, p.x)
        return A * S + B * C

    def derivative(self, p: EdgePoint) -> float:
        """Derivative along the edge coordinate (from end 0 toward end 1)."""
        A, B = self._ab(p.edge)
        S, C = _sc_scalar(self.lam, p.x)
        return A * C - self.lam * B * S

    def _ab(self, eid: int) -> tuple[float, float]:
        if self.coefficients is None:
            raise DegenerateEigenvalue(
                "no coefficients; call eigenfunction() first"
            )
        return self.coefficients[eid]


# -- root scanning ------------------------------------------------------------


def _bisect_brackets(valfun, a, b, fa, tol: float) -> np.ndarray:
    """Vectorized bisection on brackets with a sign change.

    The exit test is per bracket, so a tiny root is not left under-polished
    just because a large one in the same batch met its coarser threshold."""
    a = a.copy()
    b = b.copy()
    fa = fa.copy()
    for _ in range(120):
        m = 0.5 * (a + b)
        fm = valfun(m)
        exact = fm == 0.0
        if exact.any():
            a[exact] = m[exact]
            b[exact] = m[exact]
        same = (fm > 0) == (fa > 0)
        move_a = same & ~exact
        move_b = ~same & ~exact
        a[move_a] = m[move_a]
        fa[move_a] = fm[move_a]
        b[move_b] = m[move_b]
        if np.all(b - a < tol * np.maximum(1.0, np.abs(b))):
            break
    return 0.5 * (a + b)


def _refine_extremum(valfun_scalar, t0: float, width: float) -> float:
    """Sharpen an even-order root: bisect on a finite-difference derivative
    of the secular value around the magnitude minimum."""
    dt = 1e-7 * max(1.0, abs(t0))

    def dF(t):
        return valfun_scalar(t + dt) - valfun_scalar(t - dt)

    a, b = t0 - width, t0 + width
    da, db = dF(a), dF(b)
    if da == 0.0:
        return a
    if db == 0.0:
        return b
    if (da > 0) == (db > 0):
        return t0
    for _ in range(70):
        m = 0.5 * (a + b)
        dm = dF(m)
        if dm == 0.0:
            return m
        if (dm > 0) == (da > 0):
            a, da = m, dm
        else:
            b, db = m, dm
    return 0.5 * (a + b)


def _multiplicity_at_root(svals: np.ndarray) -> int:
    """Rank deficiency at a located root.  The envelope 10 * s_min absorbs
    the location error of even-order roots, which cannot be polished to
    machine precision from magnitude data alone.  Row scaling bounds every
    singular value by a small constant, so the scale reference max(s_max, 1)
    stays honest even when the whole matrix degenerates."""
    smax = float(svals[0])
    smin = float(svals[-1])
    scale = max(smax, 1.0)
    if smin > 1e-3 * scale:
        raise ConsistencyError(
            f"located root is not rank deficient (s_min = {smin:.3g})"
        )
    thresh = max(RANK_RTOL * scale, 10.0 * smin)
    return int(np.sum(svals <= thresh))


def _branch_roots(
    vals,
    svals,
    t_grid: np.ndarray,
    tol: float = DEFAULT_TOL,
    probes: Sequence[float] = (),
    soft: set | None = None,
) -> list[float]:
    """All roots of the secular value along one branch, as scan parameters.

    vals maps an array of scan parameters to secular values, svals maps one
    parameter to the singular values there.  Sign changes are bisected;
    strict local minima of the magnitude away from found roots are polished
    and kept when the smallest singular value certifies a rank drop
    (even-order zeros give no sign change).  Probes are exact candidate
    parameters checked directly by the rank test; they cover roots whose
    magnitude dip is too narrow for the grid to see.

    Magnitude-minimum roots are recorded in soft: the rank test cannot tell
    an even-order root from the midpoint of a yet-unresolved pair of simple
    roots, so these entries may later be withdrawn when the pair is found.
    """
    F = vals(t_grid)
    roots: list[float] = []
    local_soft: set = set()
    # an exact 0.0 reading is almost always cancellation underflow next to a
    # high-order zero, not a grid point landing on a root; keep it soft so
    # the window count can withdraw it
    exact = np.flatnonzero(F == 0.0)
    for i in exact:
        roots.append(float(t_grid[i]))
        local_soft.add(float(t_grid[i]))
    sgn = np.sign(F)
    nz = sgn != 0
    flips = np.flatnonzero(nz[:-1] & nz[1:] & (sgn[:-1] != sgn[1:]))
    if flips.size:
        a = t_grid[flips].astype(float)
        b = t_grid[flips + 1].astype(float)
        fa = F[flips].astype(float)
        found = _bisect_brackets(vals, a, b, fa, tol)
        roots.extend(float(t) for t in found)
    # even-order pass
    absF = np.abs(F)
    root_arr = np.array(sorted(roots)) if roots else np.empty(0)
    step = float(t_grid[1] - t_grid[0]) if len(t_grid) > 1 else 1.0

    def val_at(t: float) -> float:
        return float(vals(np.array([t]))[0])

    for i in range(1, len(t_grid) - 1):
        if not (absF[i] < absF[i - 1] and absF[i] <= absF[i + 1]):
            continue
        if root_arr.size and np.min(np.abs(root_arr - t_grid[i])) < 1.5 * step:
            continue
        lo, hi = float(t_grid[i - 1]), float(t_grid[i + 1])
        res = minimize_scalar(
            lambda t: abs(val_at(t)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": max(tol, 1e-10)},
        )
        t0 = float(res.x)
        t0 = _refine_extremum(
            val_at,
            t0,
            min(step, t0 - lo if t0 > lo else step, hi - t0 if hi > t0 else step),
        )
        # a sign change within the polish error means the minimum was a
        # simple crossing the node pattern hid (a second root in the same
        # cell cancels the net flip); bisect it like any bracket
        w = 1e-5 * max(1.0, abs(t0))
        fa_, fb_ = val_at(t0 - w), val_at(t0 + w)
        if fa_ != 0.0 and fb_ != 0.0 and (fa_ > 0) != (fb_ > 0):
            t0 = float(
                _bisect_brackets(
                    vals, np.array([t0 - w]), np.array([t0 + w]),
                    np.array([fa_]), tol,
                )[0]
            )
            roots.append(t0)
            continue
        sv = svals(t0)
        if sv[-1] <= ACCEPT_SIGMA * max(sv[0], 1.0):
            roots.append(t0)
            local_soft.add(t0)
    for t0 in probes:
        sv = svals(float(t0))
        if sv[-1] > ACCEPT_SIGMA * max(sv[0], 1.0):
            continue
        # the probe location is exact, so it supersedes any bisected or
        # polished root that landed within merge distance of it
        roots = [r for r in roots if abs(t0 - r) > 1e-9 * max(1.0, t0)]
        roots.append(float(t0))
    # dedupe
    roots.sort()
    merged: list[float] = []
    for t in roots:
        if merged and abs(t - merged[-1]) <= 1e-9 * max(1.0, abs(t)):
            continue
        merged.append(t)
    if soft is not None:
        soft.update(t for t in merged if t in local_soft)
    return merged


# -- exact counting by the argument principle ----------------------------------


def _segment_phase_sum(
    sys: SecularSystem, za: complex, zb: complex, ts: np.ndarray
) -> float:
    """Continuous phase change of the determinant along one straight contour
    segment, from the given seed nodes: midpoints are inserted until every
    consecutive phase step is below pi/2, which pins the branch of the
    argument provided no step can hide a full turn (the seeding in
    _contour_count guarantees that for the one known high-order zero)."""
    direction = zb - za

    def signs_at(ts: np.ndarray) -> np.ndarray:
        zs = za + direction * ts
        s = sys.contour_signs(zs)
        shift = 1e-7
        for _ in range(3):
            bad = np.flatnonzero(s == 0.0)
            if bad.size == 0:
                return s
            zs = zs.copy()
            zs[bad] += direction * shift
            s = s.copy()
            s[bad] = sys.contour_signs(zs[bad])
            shift *= 7.0
        if np.any(s == 0.0):
            raise ConsistencyError("determinant vanishes on the counting contour")
        return s

    ph = np.angle(signs_at(ts))
    for _ in range(60):
        d = np.angle(np.exp(1j * np.diff(ph)))
        bad = np.flatnonzero(np.abs(d) > 0.5 * math.pi)
        if bad.size == 0:
            return float(np.sum(d))
        if ts.size > 60000:
            raise ConsistencyError("counting contour sampling budget exhausted")
        tm = 0.5 * (ts[bad] + ts[bad + 1])
        pm = np.angle(signs_at(tm))
        ts = np.insert(ts, bad + 1, tm)
        ph = np.insert(ph, bad + 1, pm)
    raise ConsistencyError("counting contour phase did not settle")


def _segment_seed(za: complex, zb: complex, per_unit: float, order: int) -> np.ndarray:
    """Seed parameters in [0, 1] for one contour segment, dense enough that
    the determinant phase cannot wrap unnoticed between neighbors.

    The determinant has a zero of known order at k = 0, so near the origin
    a uniform grid can step across almost the entire phase turn of that
    zero and alias it away.  Walking with steps that shrink in proportion
    to the distance from the origin, divided by the order, caps the phase
    each step can pick up there at pi / 4; every other zero either has low
    order (a step near it stays under a half turn, which the pi / 2
    refinement test then resolves) or is kept away from the contour by the
    split-point retries."""
    L = abs(zb - za)
    h_uni = 1.0 / (L * per_unit + 8.0)
    fac = math.tan(0.25 * math.pi / max(order, 1))
    ts = [0.0]
    t = 0.0
    while t < 1.0:
        z = za + (zb - za) * t
        h = min(h_uni, fac * abs(z) / ((1.0 + fac) * L))
        if h <= 0.0:
            raise ConsistencyError("counting contour touches the origin")
        t = min(1.0, t + h)
        ts.append(t)
        if len(ts) > 30000:
            raise ConsistencyError("counting contour seed budget exhausted")
    return np.asarray(ts)


def _contour_count(
    sys: SecularSystem,
    lo: float,
    hi: float,
    eta: float,
    axis: str,
    per_unit: float,
) -> int:
    """Number of eigenvalue wavenumbers in (lo, hi), counted with
    multiplicity, as the winding number of the determinant around a
    rectangle of half-height eta enclosing the segment.

    axis "real" counts positive-branch wavenumbers k, axis "imag" counts
    negative-branch decay rates kappa; lo > 0 keeps k = 0 outside.
    """
    if axis == "real":
        corners = [lo - 1j * eta, hi - 1j * eta, hi + 1j * eta, lo + 1j * eta]
    else:
        corners = [eta + 1j * lo, eta + 1j * hi, -eta + 1j * hi, -eta + 1j * lo]
    order = sys.origin_order()
    total = 0.0
    for za, zb in zip(corners, corners[1:] + corners[:1]):
        seed = _segment_seed(za, zb, per_unit, order)
        total += _segment_phase_sum(sys, za, zb, seed)
    w = total / (2.0 * math.pi)
    iw = int(round(w))
    if abs(w - iw) > 0.25 or iw < 0:
        raise ConsistencyError(f"contour winding {w:.4f} is not a valid count")
    return iw


def _resolve_zero_count(
    sys: SecularSystem,
    pos: Sequence[tuple[float, int]],
    neg: Sequence[tuple[float, int]],
    c_lo: float,
    c_hi: float,
    per_unit: float,
) -> int:
    """Multiplicity of lam = 0 as an eigenvalue, resolved by winding.

    The rank test at 0 cannot tell a true zero mode from an eigenvalue
    that merely lies within its tolerance of 0.  The winding of the
    determinant around a small origin square reads twice the zero
    multiplicity, plus one per edge from the basis factor, plus two per
    branch root enclosed; the branch scans have already certified those
    roots, so the zero multiplicity follows exactly.
    """
    bound = sys.zero_rank_drop()
    if bound == 0:
        return 0
    E = len(sys.edge_order)
    eps = 3.163e-7  # |lam| below 1e-13 counts as the origin itself
    known = [(t, m) for t, m in list(pos) + list(neg) if t > eps]
    order = 2 * bound + E
    last: Exception | None = None
    for rank in range(6):
        c = _clear_point(c_lo, c_hi, [t for t, _ in known if t < 2.0 * c_hi], rank)
        near = sum(m for t, m in known if t < c)
        corners = [c - 1j * c, c + 1j * c, -c + 1j * c, -c - 1j * c]
        try:
            total = 0.0
            for za, zb in zip(corners, corners[1:] + corners[:1]):
                seed = _segment_seed(za, zb, per_unit, order)
                total += _segment_phase_sum(sys, za, zb, seed)
            w = total / (2.0 * math.pi)
            iw = int(round(w))
            if abs(w - iw) > 0.25:
                raise ConsistencyError(
                    f"origin winding {w:.4f} is not integral"
                )
            m2 = iw - E - 2 * near
            if m2 < 0 or m2 % 2 or m2 > 2 * bound:
                raise ConsistencyError(
                    f"origin winding {iw} inconsistent with {near} nearby "
                    f"roots and rank drop {bound}"
                )
            return m2 // 2
        except ConsistencyError as exc:
            last = exc
    raise last if last is not None else ConsistencyError("origin count failed")


def _clear_point(lo: float, hi: float, avoid: Sequence[float], rank: int = 0) -> float:
    """A point of (lo, hi) comfortably away from every value in avoid; rank
    selects progressively different candidates for retries."""
    cands = np.linspace(lo, hi, 21)[1:-1]
    if not avoid:
        return float(cands[(len(cands) // 2 + 3 * rank) % len(cands)])
    av = np.asarray(sorted(avoid), dtype=float)
    dists = np.array([float(np.min(np.abs(av - c))) for c in cands])
    order = np.argsort(-dists)
    return float(cands[order[min(rank, len(order) - 1)]])


def _split_counts(
    sys: SecularSystem,
    axis: str,
    a: float,
    b: float,
    target: int,
    avoid: Sequence[float],
    eta0: float,
    per_unit: float,
) -> tuple[float, int, int, float]:
    """Split (a, b) at a point whose two window counts add up to target.

    A count that refuses to split consistently signals a root close to the
    attempted split point (a winding contour must not pass near a zero), so
    other candidates are tried before giving up.
    """
    last: Exception | None = None
    for rank in range(6):
        mid = _clear_point(a, b, avoid, rank)
        eta = min(eta0, 0.45 * (mid - a), 0.45 * (b - mid))
        try:
            ca = _contour_count(sys, a, mid, eta, axis, per_unit)
            cb = _contour_count(sys, mid, b, eta, axis, per_unit)
        except ConsistencyError as exc:
            last = exc
            continue
        if ca + cb == target:
            return mid, ca, cb, eta
        last = ConsistencyError(
            f"window counts {ca} + {cb} disagree with parent count {target}"
        )
    raise last if last is not None else ConsistencyError("split failed")


def _reconcile(
    sys: SecularSystem,
    vals,
    svals,
    axis: str,
    a: float,
    b: float,
    target: int,
    roots: list,
    mults: dict,
    soft: set,
    tol: float,
    eta0: float,
    per_unit: float,
    step_hint: float,
    probes: Sequence[float] = (),
    depth: int = 0,
) -> None:
    """Bring the located roots in (a, b] into agreement with the contour
    count, densifying the scan locally and splitting the window until every
    eigenvalue is accounted for.  Raises BracketFailure when a cluster
    cannot be resolved and ConsistencyError when the counts themselves
    disagree."""
    def have() -> int:
        return sum(mults[r] for r in roots if a < r <= b)

    def purge_excess() -> int:
        # a surplus means some magnitude-minimum entry was really the
        # midpoint of a since-resolved pair of simple roots; withdraw the
        # least singular soft entries until the window balances
        h = have()
        while h > target:
            cands = [r for r in roots if a < r <= b and r in soft]
            if not cands:
                break
            worst = max(cands, key=lambda r: float(svals(r)[-1]))
            roots.remove(worst)
            soft.discard(worst)
            mults.pop(worst, None)
            h = have()
        return h

    h = purge_excess()
    if h == target:
        return
    if h > target:
        raise ConsistencyError(
            f"located {h} roots in ({a:.9g}, {b:.9g}) where the contour holds {target}"
        )
    if depth >= 40:
        raise BracketFailure(
            f"cannot resolve {target - h} missing roots in ({a:.9g}, {b:.9g})"
        )
    n_dense = min(4097, int((b - a) / step_hint * 8.0) + 17)
    grid = np.linspace(a, b, n_dense)
    for t in _branch_roots(vals, svals, grid, tol, soft=soft):
        if all(abs(t - r) > 1e-9 * max(1.0, abs(t)) for r in roots):
            roots.append(t)
            mults[t] = _multiplicity_at_root(svals(t))
        else:
            soft.discard(t)
    h = purge_excess()
    if h == target:
        return
    if h > target:
        raise ConsistencyError(
            f"located {h} roots in ({a:.9g}, {b:.9g}) where the contour holds {target}"
        )
    if b - a <= 1e-8 * max(1.0, abs(b)):
        raise BracketFailure(
            f"unresolved root cluster of size {target - h} near {0.5 * (a + b):.9g}"
        )
    mid, ca, cb, eta = _split_counts(
        sys, axis, a, b, target, list(roots) + list(probes), eta0, per_unit
    )
    _reconcile(
        sys, vals, svals, axis, a, mid, ca, roots, mults, soft, tol,
        eta, per_unit, step_hint, probes, depth + 1,
    )
    _reconcile(
        sys, vals, svals, axis, mid, b, cb, roots, mults, soft, tol,
        eta, per_unit, step_hint, probes, depth + 1,
    )


def _certify_lifted(run, lo0: float, roots: list, mults: dict, soft: set):
    """Certify from the natural inner edge, once more with the edge lifted
    if the contour near the spectral origin cannot settle.

    On the coupling variety where the determinant picks up an accidental
    extra zero order at the origin, its values near the inner contour edge
    sink below rounding noise and the phases there are unresolvable.  The
    lifted pass stays under every hard root and withdraws soft candidates
    stranded below the new edge (they are the near-origin artifacts that
    forced the lift), conceding certification, not detection, of roots
    with scan parameter under 1e-4."""
    lo_retry = 1e-4
    hard = [r for r in roots if r not in soft]
    if hard:
        lo_retry = min(lo_retry, 0.45 * min(hard))
    err: ConsistencyError | None = None
    for lo in dict.fromkeys((lo0, max(lo0, lo_retry))):
        if lo > lo0:
            for r in [r for r in roots if r < lo and r in soft]:
                roots.remove(r)
                soft.discard(r)
                mults.pop(r, None)
        try:
            return run(lo)
        except ConsistencyError as exc:
            err = exc
    raise err


def _certified_roots(
    sys: SecularSystem,
    vals,
    svals,
    axis: str,
    lo: float,
    top: float,
    roots: list,
    mults: dict,
    soft: set,
    tol: float,
    eta0: float,
    per_unit: float,
    step_hint: float,
    probes: Sequence[float] = (),
) -> None:
    """Certify completeness of the located roots on (lo, top] against the
    argument-principle count, cross-checking the full window against a
    two-piece split to guard the sampling itself."""
    whole = _contour_count(sys, lo, top, eta0, axis, per_unit)
    mid, ca, cb, eta = _split_counts(
        sys, axis, lo, top, whole, list(roots) + list(probes), eta0, per_unit
    )
    _reconcile(
        sys, vals, svals, axis, lo, mid, ca, roots, mults, soft, tol,
        eta, per_unit, step_hint, probes,
    )
    _reconcile(
        sys, vals, svals, axis, mid, top, cb, roots, mults, soft, tol,
        eta, per_unit, step_hint, probes,
    )


def _negative_kappa_bound(g: MetricGraph) -> float:
    """Safe upper bound for the decay rate of the lowest eigenvalue,
    via a trace estimate of the quadratic form."""
    s = sum(
        abs(c.alpha)
        for _, c in g.vertices()
        if not c.is_dirichlet and c.alpha < 0.0
    )
    if s == 0.0:
        return 0.0
    lmin = min(e.length for _, e in g.edges())
    ell = min(lmin, 1.0 / (2.0 * s))
    return math.sqrt(2.0 * s / ell) * 1.05 + 0.5


def eigenvalues(
    g: MetricGraph,
    query: SpectrumQuery | None = None,
    *,
    count: int | None = None,
    kmax: float | None = None,
    tolerance: float = DEFAULT_TOL,
) -> list[EigenPair]:
    """Ordered eigenvalues (negative branch, zero, then positive branch).

    A root of multiplicity m contributes m consecutive entries sharing lam.
    Both branches are scanned by sign change, magnitude minima and loop
    probes, then certified complete against the argument-principle count of
    the determinant; deficits trigger local densification, and
    BracketFailure is raised only for clusters tighter than the resolvable
    scale.
    """
    if query is None:
        query = SpectrumQuery(count=count, kmax=kmax, tolerance=tolerance)
    sys = SecularSystem(g)
    L_tot = g.total_length

    def vals_pos(ts: np.ndarray) -> np.ndarray:
        return sys.values(np.asarray(ts, dtype=float) ** 2)

    def svals_pos(t: float) -> np.ndarray:
        return sys.singular_values(float(t) ** 2)

    def vals_neg(ts: np.ndarray) -> np.ndarray:
        return sys.neg_values(np.asarray(ts, dtype=float))

    def svals_neg(t: float) -> np.ndarray:
        return sys.neg_singular_values(float(t))

    per_unit = max(8.0, 2.0 * L_tot)

    # negative branch and zero are independent of the k window
    neg: list[tuple[float, int]] = []
    neg_k: list[tuple[float, int]] = []
    kap_hi = _negative_kappa_bound(g)
    if kap_hi > 0.0:
        # absolute floor: decay rates below it have |lam| under tolerance,
        # and a bound tied to kap_hi would leave a macroscopic hole when a
        # strong coupling coexists with a weak one
        t0 = 1e-6 * min(1.0, kap_hi)
        t_grid = np.linspace(t0, kap_hi, 512)
        soft_neg: set = set()
        roots = _branch_roots(
            vals_neg, svals_neg, t_grid, query.tolerance, soft=soft_neg
        )
        mults = {t: _multiplicity_at_root(svals_neg(t)) for t in roots}
        # the scan bound has headroom, so a cleared top point exists above
        # every true decay rate; retry with another one if a missed root
        # sits close enough to corrupt the window count
        def certify_neg(lo: float) -> None:
            err: ConsistencyError | None = None
            for rank in range(4):
                top = _clear_point(kap_hi, kap_hi * 1.02 + 0.01, roots, rank)
                try:
                    _certified_roots(
                        sys, vals_neg, svals_neg, "imag", lo, top, roots,
                        mults, soft_neg, query.tolerance,
                        eta0=0.25 * min(1.0, kap_hi),
                        per_unit=per_unit, step_hint=kap_hi / 511.0,
                    )
                    return
                except ConsistencyError as exc:
                    err = exc
            raise err

        _certify_lifted(certify_neg, 0.5 * t0, roots, mults, soft_neg)
        neg = sorted((-(t * t), mults[t]) for t in roots)
        neg_k = sorted((t, mults[t]) for t in roots)

    base_step = math.pi / (4.0 * L_tot)
    loop_lengths = [e.length for _, e in g.edges() if e.u == e.v]

    def loop_probes(k_hi: float) -> list[float]:
        # a sine supported on one loop satisfies any vertex condition, so
        # every loop contributes (2 pi j / L)^2 exactly; probing them guards
        # against sign-preserving roots the grid cannot resolve
        out = []
        for L in loop_lengths:
            j = 1
            while 2.0 * math.pi * j / L <= k_hi:
                out.append(2.0 * math.pi * j / L)
                j += 1
        return out

    def scan_positive(k_hi: float) -> list[tuple[float, int]]:
        step = base_step
        k_scan = k_hi + 0.75 * step
        probes = loop_probes(k_scan)
        n = max(8, int(math.ceil(k_scan / step)) + 1)
        t_grid = np.linspace(step * 1e-6, k_scan, n)
        soft: set = set()
        roots = _branch_roots(
            vals_pos, svals_pos, t_grid, query.tolerance, probes, soft=soft
        )
        mults = {t: _multiplicity_at_root(svals_pos(t)) for t in roots}

        def certify_pos(lo: float) -> float:
            err: ConsistencyError | None = None
            for rank in range(4):
                top = _clear_point(
                    k_hi + 0.05 * step, k_hi + 0.7 * step,
                    list(roots) + list(probes), rank,
                )
                try:
                    _certified_roots(
                        sys, vals_pos, svals_pos, "real", lo, top,
                        roots, mults, soft, query.tolerance,
                        eta0=0.25 * step, per_unit=per_unit,
                        step_hint=step, probes=probes,
                    )
                    return top
                except ConsistencyError as exc:
                    err = exc
            raise err

        top = _certify_lifted(
            certify_pos, 0.5 * step * 1e-6, roots, mults, soft
        )
        return sorted((t, mults[t]) for t in roots if t <= top)

    c_lo = max(2.5e-4 * base_step, 2e-6)
    c_hi = max(0.25 * base_step, 4.0 * c_lo)

    def zero_count(pos: list[tuple[float, int]]) -> int:
        return _resolve_zero_count(sys, pos, neg_k, c_lo, c_hi, per_unit)

    if query.kmax is not None:
        pos = scan_positive(float(query.kmax))
        pairs = _assemble(neg, zero_count(pos), pos)
        return [p for p in pairs if p.lam <= query.kmax**2 * (1 + 1e-12) + 1e-12]

    want = int(query.count)
    k_hi = math.pi * (want + g.n_vertices + 4) / L_tot
    m0: int | None = None
    for _ in range(10):
        pos = scan_positive(k_hi)
        if m0 is None:
            m0 = zero_count(pos)
        pairs = _assemble(neg, m0, pos)
        if len(pairs) >= want:
            return pairs[:want]
        k_hi = k_hi * 1.5 + math.pi / L_tot
    raise BracketFailure(f"could not collect {want} eigenvalues")


def _assemble(
    neg: list[tuple[float, int]], m0: int, pos: list[tuple[float, int]]
) -> list[EigenPair]:
    entries: list[tuple[float, str, int]] = []
    for lam, mult in neg:
        if lam >= -1e-13:
            continue
        entries.append((lam, "neg", mult))
    if m0 > 0:
        entries.append((0.0, "zero", m0))
    for t, mult in pos:
        lam = t * t
        if lam <= 1e-13 and m0 > 0:
            continue
        entries.append((lam, "pos", mult))
    pairs: list[EigenPair] = []
    n = 1
    for lam, branch, mult in entries:
        for _ in range(mult):
            pairs.append(
                EigenPair(
                    n=n,
                    lam=lam,
                    k=math.sqrt(abs(lam)),
                    branch=branch,
                    multiplicity=mult,
                    simple=(mult == 1),
                )
            )
            n += 1
    return pairs


@dataclass(frozen=True)
class WeylAudit:
    found: int
    expected: float
    slack: int

    @property
    def ok(self) -> bool:
        return self.found >= self.expected - self.slack


def weyl_audit(g: MetricGraph, pairs: Sequence[EigenPair]) -> WeylAudit:
    """Compare the number of positive-branch eigenvalues found below the
    largest computed wavenumber with the asymptotic count."""
    ks = [p.k for p in pairs if p.branch == "pos"]
    if not ks:
        return WeylAudit(0, 0.0, 0)
    k_hi = max(ks)
    found = len(ks)
    expected = g.total_length * k_hi / math.pi
    return WeylAudit(found, expected, g.n_vertices + g.n_edges + 2)


# -- eigenfunctions -----------------------------------------------------------


def eigenfunction(g: MetricGraph, pair: EigenPair) -> EigenPair:
    """Fill in normalized coefficients for a simple eigenvalue.

    The null vector of the secular matrix is rescaled to unit L2 norm over
    the graph; the global sign makes the first coefficient of significant
    size positive, in edge id order (A before B).  The vertex-condition
    residual of the normalized function is recorded.
    """
    if not pair.simple or pair.multiplicity != 1:
        raise DegenerateEigenvalue(
            f"eigenvalue {pair.lam:.12g} has multiplicity {pair.multiplicity}"
        )
    sys = SecularSystem(g)
    M = sys.matrix(pair.lam)
    _, svals, Vh = np.linalg.svd(M)
    vec = Vh[-1]
    residual = float(np.max(np.abs(M @ vec)))
    norm_sq = 0.0
    coeffs: dict[int, tuple[float, float]] = {}
    for eid in g.edge_ids:
        p = sys.edge_pos[eid]
        A, B = float(vec[2 * p]), float(vec[2 * p + 1])
        coeffs[eid] = (A, B)
        I_SS, I_SC, I_CC = _edge_integrals(pair.lam, g.edge(eid).length)
        norm_sq += A * A * I_SS + 2.0 * A * B * I_SC + B * B * I_CC
    if norm_sq <= 0.0:
        raise ConsistencyError("null vector has vanishing L2 norm")
    scale = 1.0 / math.sqrt(norm_sq)
    cmax = max(max(abs(a), abs(b)) for a, b in coeffs.values())
    sign = 1.0
    for eid in g.edge_ids:
        A, B = coeffs[eid]
        done = False
        for c in (A, B):
            if abs(c) > 1e-9 * cmax:
                sign = 1.0 if c > 0 else -1.0
                done = True
                break
        if done:
            break
    coeffs = {
        eid: (A * scale * sign, B * scale * sign) for eid, (A, B) in coeffs.items()
    }
    return replace(pair, coefficients=coeffs, normalized=True, residual=residual)


def vertex_values(g: MetricGraph, pair: EigenPair) -> dict[int, float]:
    out = {}
    for vid in g.vertex_ids:
        eid, side = g.ends_at(vid)[0]
        x = 0.0 if side == 0 else g.edge(eid).length
        out[vid] = pair.value(EdgePoint(eid, x))
    return out


def _edge_sup(pair: EigenPair, eid: int, L: float) -> float:
    A, B = pair._ab(eid)
    lam = pair.lam
    cands = [abs(pair.value(EdgePoint(eid, 0.0))), abs(pair.value(EdgePoint(eid, L)))]
    if lam > 0.0:
        k = math.sqrt(lam)
        R = math.hypot(A / k, B)
        phi0 = math.atan2(B, A / k)
        # an interior extremum realizes the full amplitude
        j_lo = math.ceil((phi0 - 0.5 * math.pi) / math.pi + 1e-12)
        x = (0.5 * math.pi + j_lo * math.pi - phi0) / k
        if 0.0 < x < L:
            cands.append(R)
    elif lam < 0.0:
        kap = math.sqrt(-lam)
        # f' = A cosh + kap B sinh vanishes at most once
        if B != 0.0:
            r = -A / (kap * B)
            if -1.0 < r < 1.0:
                x = math.atanh(r) / kap
                if 0.0 < x < L:
                    cands.append(abs(pair.value(EdgePoint(eid, x))))
    return max(cands)


def sup_norm(g: MetricGraph, pair: EigenPair) -> float:
    return max(_edge_sup(pair, eid, e.length) for eid, e in g.edges())


def is_proper(g: MetricGraph, pair: EigenPair) -> bool:
    """Simple eigenvalue whose eigenfunction is nonzero at every
    non-Dirichlet vertex (threshold 1e-9 relative to the sup norm)."""
    if not pair.simple:
        return False
    if pair.coefficients is None:
        pair = eigenfunction(g, pair)
    sup = sup_norm(g, pair)
    vals = vertex_values(g, pair)
    for vid, cond in g.vertices():
        if cond.is_dirichlet:
            continue
        if abs(vals[vid]) <= VERTEX_ZERO_RTOL * sup:
            return False
    return True


def _edge_zeros(pair: EigenPair, eid: int, L: float, amp: float) -> list[float]:
    A, B = pair._ab(eid)
    lam = pair.lam
    if _edge_sup(pair, eid, L) <= 1e-12 * amp:
        raise IdenticallyZeroEdge(f"eigenfunction vanishes on edge {eid}")
    out = []
    if lam > 0.0:
        k = math.sqrt(lam)
        phi0 = math.atan2(B, A / k)
        j = math.floor(phi0 / math.pi) - 1
        while True:
            x = (j * math.pi - phi0) / k
            j += 1
            if x <= 0.0:
                continue
            if x >= L:
                break
            out.append(x)
    elif lam == 0.0:
        if A != 0.0:
            x = -B / A
            if 0.0 < x < L:
                out.append(x)
    else:
        kap = math.sqrt(-lam)
        if A != 0.0:
            r = -B * kap / A
            if 0.0 < r < 1.0:
                x = math.atanh(r) / kap
                if 0.0 < x < L:
                    out.append(x)
    return out


def zeros(
    g: MetricGraph, pair: EigenPair, vertex_tol: float = VERTEX_ZERO_RTOL
) -> Partition:
    """Ordered zero set of the eigenfunction strictly inside edges.

    A zero within vertex_tol * L of an edge end makes the returned
    partition improper, except next to a Dirichlet vertex, where the
    eigenfunction vanishes structurally and the crumb is discarded; an
    edge where the function vanishes identically raises
    IdenticallyZeroEdge.
    """
    if pair.coefficients is None:
        pair = eigenfunction(g, pair)
    amp = sup_norm(g, pair)
    pts: list[EdgePoint] = []
    for eid, e in g.edges():
        margin = vertex_tol * e.length
        for x in _edge_zeros(pair, eid, e.length, amp):
            if x <= margin and g.condition(e.u).is_dirichlet:
                continue
            if x >= e.length - margin and g.condition(e.v).is_dirichlet:
                continue
            pts.append(EdgePoint(eid, x))
    return make_partition(g, pts, vertex_tol=vertex_tol)


def nodal_counts(g: MetricGraph, pair: EigenPair) -> tuple[int, int]:
    """(mu, nu): the number of interior zeros and of nodal components.

    nu is counted by cutting at the zero set and labeling components; the
    cycle-rank identity nu = mu + 1 - (betti(g) - betti(cut)) is asserted
    as an independent cross-check.
    """
    if not is_connected(g):
        raise InvalidGraph("nodal counts need a connected graph")
    if pair.coefficients is None:
        pair = eigenfunction(g, pair)
    if not is_proper(g, pair):
        raise ImproperEigenfunction(
            f"eigenfunction {pair.n} vanishes at a vertex or is degenerate"
        )
    part = zeros(g, pair)
    if not part.proper:
        raise ImproperEigenfunction("zero set touches a vertex")
    res = cut(g, part)
    mu = part.mu
    nu = res.n_components
    drop = betti(g) - betti(res.graph)
    if nu != mu + 1 - drop:
        raise ConsistencyError(
            f"nodal count mismatch: nu={nu}, mu={mu}, rank drop={drop}"
        )
    return mu, nu


def ground_energy(g: MetricGraph) -> float:
    """Lowest eigenvalue of the graph."""
    return eigenvalues(g, count=1)[0].lam


def rayleigh_quotient(g: MetricGraph, pair: EigenPair) -> float:
    """Quadratic form value of a normalized eigenfunction; equals lam."""
    if pair.coefficients is None:
        pair = eigenfunction(g, pair)
    total = 0.0
    for eid, e in g.edges():
        A, B = pair.coefficients[eid]
        I_SS, I_SC, I_CC = _edge_integrals(pair.lam, e.length)
        total += (
            A * A * I_CC
            - 2.0 * pair.lam * A * B * I_SC
            + pair.lam**2 * B * B * I_SS
        )
    vals = vertex_values(g, pair)
    for vid, cond in g.vertices():
        if not cond.is_dirichlet and cond.alpha != 0.0:
            total += cond.alpha * vals[vid] ** 2
    return total
