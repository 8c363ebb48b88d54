import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qgraph import (
    DegenerateEigenvalue,
    Edge,
    EdgePoint,
    ImproperEigenfunction,
    MetricGraph,
    VertexCondition,
    basis_sc,
    build_robin_tree,
    choose_sections,
    eigenfunction,
    eigenvalues,
    ground_energy,
    is_proper,
    nodal_counts,
    rayleigh_quotient,
    secular_value,
    sup_norm,
    vertex_values,
    weyl_audit,
    zeros,
)
from qgraph.library import figure_eight, interval, lasso, loop_with_edge, star3

N = VertexCondition.neumann
D = VertexCondition.dirichlet
R = VertexCondition.robin


def rel_err(found, expected):
    return abs(found - expected) / max(abs(expected), 1e-30)


def assert_spectrum(pairs, expected, rtol=1e-10):
    assert len(pairs) >= len(expected)
    for pair, lam in zip(pairs, expected):
        assert rel_err(pair.lam, lam) < rtol, (pair.n, pair.lam, lam)


def assert_km(pairs, km, rtol=1e-10):
    """Compare positive-branch pairs against oracle (k, mult) data."""
    expected = oracles.lambdas(km)
    pos = [p for p in pairs if p.branch == "pos"]
    assert len(pos) >= len(expected)
    for p, lam in zip(pos, expected):
        assert rel_err(p.lam, lam) < rtol, (p.n, p.lam, lam)
    i = 0
    for k, m in km:
        for _ in range(m):
            assert pos[i].multiplicity == m, (k, m, pos[i])
            assert pos[i].simple == (m == 1)
            i += 1


class TestBasis:
    def test_positive_energy(self):
        lam = 4.0
        for x in (0.0, 0.3, 1.0):
            S, C = basis_sc(lam, x)
            assert S == pytest.approx(math.sin(2.0 * x) / 2.0, abs=1e-14)
            assert C == pytest.approx(math.cos(2.0 * x), abs=1e-14)

    def test_zero_energy(self):
        # tiny |lam| * x**2 must fall back to the series limits S = x, C = 1
        for lam in (0.0, 1e-18, -1e-18):
            S, C = basis_sc(lam, 0.5)
            assert S == pytest.approx(0.5, abs=1e-14)
            assert C == pytest.approx(1.0, abs=1e-14)

    def test_negative_energy(self):
        lam = -9.0
        for x in (0.2, 0.9):
            S, C = basis_sc(lam, x)
            assert S == pytest.approx(math.sinh(3.0 * x) / 3.0, rel=1e-14)
            assert C == pytest.approx(math.cosh(3.0 * x), rel=1e-14)

    def test_array_energies(self):
        lams = np.array([4.0, 0.0, -9.0])
        S, C = basis_sc(lams, 1.0)
        want_S = [math.sin(2.0) / 2.0, 1.0, math.sinh(3.0) / 3.0]
        want_C = [math.cos(2.0), 1.0, math.cosh(3.0)]
        assert np.allclose(S, want_S, atol=1e-14)
        assert np.allclose(C, want_C, atol=1e-14)


class TestIntervals:
    def test_dirichlet_dirichlet(self, spectrum):
        pairs = spectrum(interval(), 20)
        assert_spectrum(pairs, oracles.dd_interval(1.0, 20))

    def test_dirichlet_dirichlet_scaled(self):
        pairs = eigenvalues(interval(0.9), count=12)
        assert_spectrum(pairs, oracles.dd_interval(0.9, 12))

    def test_neumann_neumann_has_zero_mode(self):
        g = interval(left=N(), right=N())
        pairs = eigenvalues(g, count=8)
        assert pairs[0].lam == 0.0
        assert pairs[0].branch == "zero"
        assert pairs[0].multiplicity == 1
        assert_spectrum(pairs, oracles.nn_interval(1.0, 8))

    def test_neumann_dirichlet(self):
        g = interval(left=N())
        pairs = eigenvalues(g, count=10)
        assert_spectrum(pairs, oracles.nd_interval(1.0, 10))

    def test_robin_attractive_end(self):
        g = interval(left=R(-3.0))
        pairs = eigenvalues(g, count=4)
        expected = oracles.robin_dirichlet_interval(-3.0, kmax=11.0)
        assert pairs[0].lam < 0
        assert pairs[0].branch == "neg"
        assert_spectrum(pairs, expected[:4])

    def test_robin_repulsive_end(self):
        g = interval(left=R(2.0))
        pairs = eigenvalues(g, count=4)
        expected = oracles.robin_dirichlet_interval(2.0, kmax=13.0)
        assert all(p.lam > 0 for p in pairs)
        assert_spectrum(pairs, expected[:4])

    def test_two_attractive_ends_share_one_bound_state(self):
        g = interval(left=R(-2.0), right=R(-2.0))
        pairs = eigenvalues(g, count=3)
        neg = [p.lam for p in pairs if p.lam < 0]
        expected = oracles.two_robin_negative(-2.0, -2.0)
        assert len(neg) == len(expected) == 1
        assert rel_err(neg[0], expected[0]) < 1e-10


def test_separated_weak_and_strong_traps():
    """A nearly detached bound state (kappa ~ 3e-5) must not be swallowed
    by the search floor even when another component holds a deep one."""
    g = MetricGraph(
        {0: R(-1e-9), 1: N(), 2: R(-40.0), 3: N()},
        {0: Edge(0, 1, 1.0), 1: Edge(2, 3, 1.0)},
    )
    pairs = eigenvalues(g, count=4)
    deep = oracles.robin_neumann_negative(-40.0)[0]
    shallow = oracles.robin_neumann_negative(-1e-9)[0]
    assert rel_err(pairs[0].lam, deep) < 1e-12
    assert rel_err(pairs[1].lam, shallow) < 5e-7
    assert pairs[2].lam > 0


def test_disconnected_graph_zero_multiplicity():
    g = MetricGraph(
        {i: N() for i in range(4)},
        {0: Edge(0, 1, 1.0), 1: Edge(2, 3, 1.4)},
    )
    pairs = eigenvalues(g, count=5)
    assert pairs[0].lam == 0.0 and pairs[1].lam == 0.0
    assert pairs[0].multiplicity == 2
    assert not pairs[0].simple
    merged = sorted(
        oracles.nn_interval(1.0, 3) + oracles.nn_interval(1.4, 3)
    )[:5]
    assert_spectrum(pairs, merged)


class TestGraphSpectra:
    def test_lasso(self, lasso_g, spectrum):
        pairs = spectrum(lasso_g, 12)
        assert pairs[0].lam == 0.0
        assert_km(pairs, oracles.lasso_km(kmax=16.0))

    def test_lasso_resonance_shadowed_root(self, lasso_g, spectrum):
        # regression: the root at k = 12.291 shares a scan cell with the
        # loop resonance at 4 pi and used to come out 1.7e-8 off
        pairs = spectrum(lasso_g, 12)
        expected = oracles.lambdas(oracles.lasso_km(kmax=16.0))[7]
        assert rel_err(pairs[8].lam, expected) < 1e-10
        assert rel_err(pairs[8].lam, 151.068714603901) < 1e-12

    def test_figure8(self, fig8_g, spectrum):
        pairs = spectrum(fig8_g, 8)
        assert pairs[0].lam == 0.0
        assert_km(pairs, oracles.figure8_km(kmax=16.0))

    def test_star3_short(self, star_short_g, spectrum):
        assert_km(spectrum(star_short_g, 8), oracles.star3_km(0.9, kmax=9.5))

    def test_star3_long(self, star_long_g, spectrum):
        assert_km(spectrum(star_long_g, 6), oracles.star3_km(1.1, kmax=6.5))

    def test_loop_with_edge_double_levels(self, loop_edge_g, spectrum):
        # the loop resonance at k = 2 pi j collides with a junction root
        pairs = spectrum(loop_edge_g, 9)
        assert_km(pairs, oracles.lasso_km(1.0, 1.0, kmax=13.0))
        assert pairs[3].multiplicity == 2
        assert pairs[3].lam == pytest.approx(pairs[4].lam)

    def test_circle(self):
        g = MetricGraph({0: N()}, {0: Edge(0, 0, 1.0)})
        pairs = eigenvalues(g, count=5)
        assert pairs[0].lam == 0.0
        assert_km(pairs, oracles.circle_km(1.0, kmax=14.0))

    def test_equilateral_star_dirichlet_tips(self):
        # ground state is simple at k = pi/2; the first double level sits
        # at k = pi where the equal legs swap
        pairs = eigenvalues(star3((1.0, 1.0, 1.0)), count=4)
        assert rel_err(pairs[0].lam, (0.5 * math.pi) ** 2) < 1e-10
        assert pairs[0].multiplicity == 1 and pairs[0].simple
        assert pairs[1].multiplicity == 2
        assert rel_err(pairs[1].lam, math.pi**2) < 1e-10

    def test_equilateral_star_free_tips(self):
        g = star3((1.0, 1.0, 1.0), tips=N())
        pairs = eigenvalues(g, count=7)
        assert pairs[0].lam == 0.0
        assert_km(pairs, oracles.equilateral_star_neumann_km(kmax=7.0))


class TestQueries:
    def test_count_is_exact(self, lasso_g):
        for count in (1, 5, 12):
            pairs = eigenvalues(lasso_g, count=count)
            assert [p.n for p in pairs] == list(range(1, count + 1))

    def test_kmax_query(self):
        g = interval(left=N(), right=N())
        pairs = eigenvalues(g, kmax=10.0)
        # k = 0, pi, 2 pi, 3 pi fit below 10
        assert len(pairs) == 4
        assert pairs[-1].lam == pytest.approx((3 * math.pi) ** 2)

    def test_eigenvalues_sorted(self, fig8_g, spectrum):
        lams = [p.lam for p in spectrum(fig8_g, 8)]
        assert lams == sorted(lams)

    def test_k_matches_lambda(self, lasso_g, spectrum):
        for p in spectrum(lasso_g, 12):
            assert p.k == pytest.approx(math.sqrt(abs(p.lam)))


def test_phantom_zero_near_dirichlet_pair():
    """Splitting a loop at a tiny angle once produced a spurious zero mode;
    the true bottom eigenvalue is slightly negative (the minus side carries
    strength -tan(phi/2) < 0) and nothing sits at lambda = 0."""
    g = lasso()
    secs = choose_sections(g)
    for phi in (2e-4, 1e-5):
        split = build_robin_tree(g, secs, (phi,))
        pairs = eigenvalues(split.graph, count=3)
        assert pairs[0].lam < 0.0
        assert abs(pairs[0].lam) < 1e-3
        assert all(p.branch != "zero" for p in pairs)
        assert pairs[1].lam > 0.1


class TestEigenfunctions:
    def test_interval_ground_state(self):
        g = interval()
        f = eigenfunction(g, eigenvalues(g, count=1)[0])
        assert f.normalized
        assert f.residual < 1e-9
        mid = f.value(EdgePoint(0, 0.5))
        assert abs(mid) == pytest.approx(math.sqrt(2.0), rel=1e-9)
        assert f.value(EdgePoint(0, 0.0)) == pytest.approx(0.0, abs=1e-12)
        assert f.value(EdgePoint(0, 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_vertex_values_continuous(self, star_short_g, spectrum):
        f = eigenfunction(star_short_g, spectrum(star_short_g, 4)[0])
        vals = vertex_values(star_short_g, f)
        for eid, e in star_short_g.edges():
            assert f.value(EdgePoint(eid, 0.0)) == pytest.approx(
                vals[e.u], abs=1e-12
            )
            assert f.value(EdgePoint(eid, e.length)) == pytest.approx(
                vals[e.v], abs=1e-12
            )
        for vid in (1, 2, 3):
            assert vals[vid] == pytest.approx(0.0, abs=1e-12)

    def test_kirchhoff_balance_at_junction(self, star_short_g, spectrum):
        f = eigenfunction(star_short_g, spectrum(star_short_g, 4)[0])
        flux = 0.0
        for eid, e in star_short_g.edges():
            if e.u == 0:
                flux += f.derivative(EdgePoint(eid, 0.0))
            if e.v == 0:
                flux -= f.derivative(EdgePoint(eid, e.length))
        assert abs(flux) < 1e-9 * sup_norm(star_short_g, f)

    def test_degenerate_pair_refused(self, loop_edge_g, spectrum):
        pairs = spectrum(loop_edge_g, 5)
        assert pairs[3].multiplicity == 2
        with pytest.raises(DegenerateEigenvalue):
            eigenfunction(loop_edge_g, pairs[3])

    def test_rayleigh_quotient_returns_lambda(self, lasso_g, spectrum):
        for n in (2, 3, 6):
            pair = spectrum(lasso_g, 6)[n - 1]
            f = eigenfunction(lasso_g, pair)
            assert rel_err(rayleigh_quotient(lasso_g, f), pair.lam) < 1e-8

    def test_rayleigh_quotient_with_boundary_term(self):
        g = interval(left=R(-3.0))
        pair = eigenvalues(g, count=1)[0]
        f = eigenfunction(g, pair)
        assert pair.lam < 0
        assert rel_err(rayleigh_quotient(g, f), pair.lam) < 1e-8


class TestZerosAndNodalCounts:
    def test_interval_zero_positions(self):
        g = interval()
        for n in (1, 2, 5):
            f = eigenfunction(g, eigenvalues(g, count=n)[n - 1])
            q = zeros(g, f)
            assert q.proper
            xs = sorted(p.x for p in q.points)
            assert xs == pytest.approx(
                [j / n for j in range(1, n)], abs=1e-10
            )

    def test_dirichlet_end_crumbs_are_dropped(self):
        # regression: the structural zeros at the Dirichlet ends used to
        # survive as x = O(1e-16) points and poison the partition
        g = interval()
        pairs = eigenvalues(g, count=12)
        for n in range(1, 13):
            f = eigenfunction(g, pairs[n - 1])
            q = zeros(g, f)
            assert q.proper
            assert q.mu == n - 1
            mu, nu = nodal_counts(g, f)
            assert (mu, nu) == (n - 1, n)

    def test_nodal_identity_on_lasso(self, lasso_g, spectrum):
        from qgraph import betti, cut

        for n in (2, 3, 4, 6):
            f = eigenfunction(lasso_g, spectrum(lasso_g, 6)[n - 1])
            mu, nu = nodal_counts(lasso_g, f)
            res = cut(lasso_g, zeros(lasso_g, f))
            assert nu == res.n_components
            assert nu == mu + 1 - (betti(lasso_g) - betti(res.graph))

    def test_improper_at_junction_zero(self, lasso_g, spectrum):
        # k = 5 pi makes the eigenfunction vanish at the free junction
        pairs = spectrum(lasso_g, 12)
        target = (5 * math.pi) ** 2
        bad = min(pairs, key=lambda p: abs(p.lam - target))
        assert rel_err(bad.lam, target) < 1e-9
        f = eigenfunction(lasso_g, bad)
        assert not is_proper(lasso_g, f)
        with pytest.raises(ImproperEigenfunction):
            nodal_counts(lasso_g, f)

    def test_proper_flag_on_clean_state(self, lasso_g, spectrum):
        f = eigenfunction(lasso_g, spectrum(lasso_g, 2)[1])
        assert is_proper(lasso_g, f)


def test_ground_energy():
    assert ground_energy(interval()) == pytest.approx(math.pi**2, rel=1e-12)
    assert ground_energy(lasso()) == 0.0


def test_weyl_audit(bundled, spectrum):
    for g in bundled.values():
        audit = weyl_audit(g, spectrum(g, 30))
        assert audit.ok, audit


def test_secular_value_sign_change():
    g = interval()
    lam = math.pi**2
    assert secular_value(g, 0.98 * lam) * secular_value(g, 1.02 * lam) < 0


@settings(max_examples=25, deadline=None, derandomize=True)
@given(alpha=st.floats(min_value=-4.0, max_value=4.0))
def test_robin_ground_state_matches_oracle(alpha):
    g = interval(left=R(alpha))
    lam = eigenvalues(g, count=1)[0].lam
    expected = oracles.robin_dirichlet_interval(alpha, kmax=7.0)[0]
    assert rel_err(lam, expected) < 1e-9
