import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgraph import (
    DirichletGlue,
    Disconnects,
    Edge,
    EdgePoint,
    ImproperPartition,
    InvalidGraph,
    MetricGraph,
    VertexCondition,
    betti,
    build_robin_tree,
    choose_sections,
    components,
    cut,
    glue,
    is_bipartite,
    is_connected,
    local_sections,
    make_partition,
    wrap_angle,
)
from qgraph.library import figure_eight, interval, lasso, path, star3


@pytest.mark.parametrize(
    "raw,expected",
    [
        (0.0, 0.0),
        (math.pi, math.pi),
        (-math.pi, math.pi),
        (3.0 * math.pi, math.pi),
        (2.0 * math.pi, 0.0),
        (-0.25, -0.25),
        (math.pi + 0.1, -math.pi + 0.1),
    ],
)
def test_wrap_angle(raw, expected):
    assert wrap_angle(raw) == pytest.approx(expected, abs=1e-15)


def test_wrap_angle_periodic():
    for x in (-2.8, -0.3, 0.0, 1.1, 3.0):
        assert wrap_angle(x + 2.0 * math.pi) == pytest.approx(wrap_angle(x))


class TestVertexCondition:
    def test_classmethods(self):
        assert VertexCondition.neumann().phi == 0.0
        assert VertexCondition.dirichlet().is_dirichlet
        assert not VertexCondition.neumann().is_dirichlet

    def test_robin_round_trip(self):
        for a in (-3.0, -0.5, 0.0, 0.7, 10.0):
            c = VertexCondition.robin(a)
            assert c.alpha == pytest.approx(a, rel=1e-14)

    def test_robin_infinite_strength_is_dirichlet(self):
        assert VertexCondition.robin(math.inf).is_dirichlet
        assert VertexCondition.dirichlet().alpha == math.inf

    def test_describe(self):
        assert VertexCondition.neumann().describe() == "neumann"
        assert VertexCondition.dirichlet().describe() == "dirichlet"
        assert VertexCondition.robin(2.0).describe().startswith("robin ")


class TestMetricGraph:
    def test_validation(self):
        with pytest.raises(InvalidGraph):
            MetricGraph({0: VertexCondition.neumann()}, {})
        with pytest.raises(InvalidGraph):
            MetricGraph(
                {0: VertexCondition.neumann()},
                {0: Edge(0, 1, 1.0)},
            )
        with pytest.raises(InvalidGraph):
            MetricGraph(
                {0: VertexCondition.neumann(), 1: VertexCondition.neumann()},
                {0: Edge(0, 1, 0.0)},
            )
        with pytest.raises(InvalidGraph):
            # vertex 2 touches nothing
            MetricGraph(
                {
                    0: VertexCondition.neumann(),
                    1: VertexCondition.neumann(),
                    2: VertexCondition.neumann(),
                },
                {0: Edge(0, 1, 1.0)},
            )

    def test_loop_counts_twice_in_degree(self):
        g = lasso()
        assert g.degree(0) == 3
        assert g.degree(1) == 1

    def test_accessors(self):
        g = lasso()
        assert g.n_vertices == 2
        assert g.n_edges == 2
        assert g.total_length == pytest.approx(2.3)
        assert g.edge(1).length == pytest.approx(1.3)

    def test_with_condition_is_functional(self):
        g = interval()
        h = g.with_condition(0, VertexCondition.neumann())
        assert h.condition(0).phi == 0.0
        assert g.condition(0).is_dirichlet

    def test_equality_and_hash(self):
        assert lasso() == lasso()
        assert hash(lasso()) == hash(lasso())
        assert lasso() != lasso(tail=1.31)


def _two_intervals():
    return MetricGraph(
        {i: VertexCondition.neumann() for i in range(4)},
        {0: Edge(0, 1, 1.0), 1: Edge(2, 3, 1.4)},
    )


def test_betti():
    assert betti(interval()) == 0
    assert betti(star3()) == 0
    assert betti(lasso()) == 1
    assert betti(figure_eight()) == 2
    assert betti(path((1.0, 0.8, 1.2))) == 0
    assert betti(_two_intervals()) == 0


def test_components():
    g = _two_intervals()
    assert not is_connected(g)
    assert components(g) == [frozenset({0, 1}), frozenset({2, 3})]
    assert is_connected(lasso())


class TestPartitionAndCut:
    def test_make_partition_flags(self):
        g = interval()
        assert make_partition(g, [EdgePoint(0, 0.5)]).proper
        assert not make_partition(g, [EdgePoint(0, 0.0)]).proper
        assert not make_partition(g, [EdgePoint(0, 1.0)]).proper
        assert not make_partition(
            g, [EdgePoint(0, 0.5), EdgePoint(0, 0.5)]
        ).proper
        # a near-endpoint hit only counts against a nonzero tolerance
        assert make_partition(g, [EdgePoint(0, 1e-12)]).proper
        assert not make_partition(
            g, [EdgePoint(0, 1e-12)], vertex_tol=1e-9
        ).proper

    def test_make_partition_unknown_edge(self):
        with pytest.raises(InvalidGraph):
            make_partition(interval(), [EdgePoint(7, 0.5)])

    def test_cut_interval(self):
        g = interval()
        res = cut(g, make_partition(g, [EdgePoint(0, 0.4)]))
        assert res.n_components == 2
        assert len(res.pairs) == 1
        vm, vp = res.pairs[0]
        assert res.graph.condition(vm).is_dirichlet
        assert res.graph.condition(vp).is_dirichlet
        subs = res.subgraphs()
        assert sorted(s.total_length for s in subs) == pytest.approx([0.4, 0.6])

    def test_cut_requires_proper(self):
        g = interval()
        with pytest.raises(ImproperPartition):
            cut(g, make_partition(g, [EdgePoint(0, 0.0)]))

    def test_edge_map_round_trip(self):
        g = interval()
        res = cut(g, make_partition(g, [EdgePoint(0, 0.4)]))
        loc = res.edge_map.locate(EdgePoint(0, 0.7))
        assert not loc.at_cut
        back = res.edge_map.to_original(EdgePoint(loc.edge, loc.x))
        assert back.edge == 0
        assert back.x == pytest.approx(0.7)

    def test_cut_point_sides(self):
        # v_minus closes the smaller-coordinate side, v_plus opens the rest
        g = lasso()
        res = cut(g, make_partition(g, [EdgePoint(1, 0.2)]))
        vm, vp = res.pairs[0]
        comp_m = res.vertex_component[vm]
        comp_p = res.vertex_component[vp]
        assert comp_m != comp_p
        lengths = [s.total_length for s in res.subgraphs()]
        assert lengths[comp_p] == pytest.approx(1.1)
        assert lengths[comp_m] == pytest.approx(1.2)


class TestGlue:
    def test_strengths_add(self):
        g = MetricGraph(
            {0: VertexCondition.robin(1.5), 1: VertexCondition.robin(-0.5)},
            {0: Edge(0, 1, 1.0)},
        )
        h = glue(g, 0, 1)
        assert h.condition(0).alpha == pytest.approx(1.0)
        assert betti(h) == 1

    def test_path_ends_glue_to_circle(self):
        g = path((1.0, 1.0))
        h = glue(g, 0, 2)
        assert betti(h) == 1
        assert h.n_vertices == 2
        assert all(h.degree(v) == 2 for v in h.vertex_ids)

    def test_dirichlet_refused(self):
        g = interval()
        with pytest.raises(DirichletGlue):
            glue(g, 0, 1)

    def test_same_vertex_refused(self):
        with pytest.raises(InvalidGraph):
            glue(lasso(), 0, 0)


class TestSections:
    def test_tree_has_none(self):
        assert choose_sections(star3()) == ()
        assert choose_sections(path((1.0, 2.0))) == ()

    def test_lasso_section_on_loop(self):
        secs = choose_sections(lasso())
        assert len(secs) == 1
        assert secs[0].edge == 0
        assert 0.0 < secs[0].x < 1.0

    def test_figure8_has_two(self):
        secs = choose_sections(figure_eight())
        assert len(secs) == 2
        assert {s.edge for s in secs} == {0, 1}

    def test_local_sections_one_per_cut_cycle(self):
        g = lasso()
        # a point on the loop cuts the only cycle, so one adapted section,
        # placed away from the partition point
        q = make_partition(g, [EdgePoint(0, 0.3)])
        secs = local_sections(g, q)
        assert len(secs) == 1
        assert secs[0].edge == 0
        assert secs[0].x != pytest.approx(0.3)
        # a point on the tail cuts nothing, so no angles are in force
        q = make_partition(g, [EdgePoint(1, 0.3)])
        assert local_sections(g, q) == ()


class TestBipartite:
    def test_interval_single_point(self):
        g = interval()
        ok, colors = is_bipartite(g, make_partition(g, [EdgePoint(0, 0.6)]))
        assert ok
        assert sorted(colors.values()) == [-1, 1]

    def test_odd_cycle_points_fail(self):
        g = lasso()
        ok, colors = is_bipartite(g, make_partition(g, [EdgePoint(0, 0.4)]))
        assert not ok
        assert colors is None

    def test_even_cycle_points_pass(self):
        g = lasso()
        q = make_partition(g, [EdgePoint(0, 0.3), EdgePoint(0, 0.7)])
        ok, colors = is_bipartite(g, q)
        assert ok
        assert len(colors) == 2


class TestRobinTreeSplit:
    def test_paired_strengths(self):
        g = lasso()
        secs = choose_sections(g)
        split = build_robin_tree(g, secs, (0.6,))
        rp = split.pairs[0]
        t = math.tan(0.3)
        assert split.graph.condition(rp.minus).alpha == pytest.approx(-t)
        assert split.graph.condition(rp.plus).alpha == pytest.approx(t)
        assert betti(split.graph) == 0

    def test_pi_becomes_dirichlet_pair(self):
        g = lasso()
        split = build_robin_tree(g, choose_sections(g), (math.pi,))
        rp = split.pairs[0]
        assert split.graph.condition(rp.minus).is_dirichlet
        assert split.graph.condition(rp.plus).is_dirichlet

    def test_bridge_cut_refused(self):
        g = lasso()
        with pytest.raises(Disconnects):
            build_robin_tree(g, (EdgePoint(1, 0.5),), (0.2,))

    def test_angle_count_must_match(self):
        g = figure_eight()
        with pytest.raises(InvalidGraph):
            build_robin_tree(g, choose_sections(g), (0.1,))


# cutting at mu points removes betti(g) - betti(cut) independent cycles, so
# the component count is pinned by Euler's formula
@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    data=st.data(),
    npts=st.integers(min_value=1, max_value=4),
)
def test_cut_component_count_identity(data, npts):
    g = data.draw(
        st.sampled_from([lasso(), figure_eight(), star3(), _two_intervals()])
    )
    eids = sorted(g.edge_ids)
    pts = []
    for i in range(npts):
        eid = data.draw(st.sampled_from(eids), label=f"edge{i}")
        x = data.draw(
            st.floats(min_value=0.05, max_value=0.95), label=f"x{i}"
        )
        pts.append(EdgePoint(eid, x * g.edge(eid).length))
    q = make_partition(g, pts)
    if not q.proper:
        return
    res = cut(g, q)
    drop = betti(g) - betti(res.graph)
    n_before = len(components(g))
    assert res.n_components == q.mu + n_before - drop
