import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mobembed.contact import (
    ContactGraph, TraceError, betweenness, build_graph_sequence, closeness,
    clustering_coefficient, degree, eigenvector_centrality,
)
from mobembed.grm import PositionTrace


def graph(edges, n):
    a = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        a[u, v] = a[v, u] = True
    return ContactGraph(1, a)


TRIANGLE = graph([(0, 1), (1, 2), (0, 2)], 3)
PATH = graph([(0, 1), (1, 2)], 3)
STAR = graph([(0, k) for k in range(1, 5)], 5)
K5 = graph([(u, v) for u in range(5) for v in range(u + 1, 5)], 5)


def test_triangle_degree_and_clustering():
    assert degree(TRIANGLE).tolist() == [2, 2, 2]
    assert clustering_coefficient(TRIANGLE).tolist() == [1.0, 1.0, 1.0]


def test_path_middle_node():
    assert degree(PATH)[1] == 2
    assert clustering_coefficient(PATH)[1] == 0.0


def test_star_betweenness():
    assert betweenness(STAR).tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]


def test_complete_graph():
    assert np.all(betweenness(K5) == 0)
    assert np.allclose(closeness(K5), 1.0)
    assert np.allclose(eigenvector_centrality(K5).values, 1 / math.sqrt(5))


def test_path_closeness():
    c = closeness(PATH)
    assert c[1] == pytest.approx(1.0)
    assert c[0] == pytest.approx(2 / 3)


def test_isolated_node_closeness():
    g = graph([(0, 1)], 3)
    assert closeness(g)[2] == 0.0


def test_star_eigenvector_ratio():
    res = eigenvector_centrality(STAR)
    assert res.converged
    assert res.values[0] / res.values[1] == pytest.approx(2.0, rel=1e-8)


def test_empty_graph_eigenvector_is_uniform():
    res = eigenvector_centrality(graph([], 4))
    assert np.allclose(res.values, 0.5)


def test_bipartite_eigenvector_converges():
    res = eigenvector_centrality(PATH)
    assert res.converged
    assert np.allclose(res.values, oracles.eigenvector(PATH.adjacency), atol=1e-6)


def test_small_graphs_match_oracles():
    rng = np.random.default_rng(7)
    for _ in range(60):
        a = oracles.random_graph(rng)
        g = ContactGraph(1, a)
        assert degree(g).tolist() == a.sum(axis=1).tolist()
        assert np.array_equal(clustering_coefficient(g), oracles.clustering(a))
        assert np.allclose(betweenness(g), oracles.betweenness(a), rtol=0, atol=1e-12)
        assert np.allclose(closeness(g), oracles.closeness(a), rtol=0, atol=1e-12)
        assert np.allclose(eigenvector_centrality(g).values, oracles.eigenvector(a), atol=1e-6)


def test_agrees_with_networkx_on_larger_graph():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(3)
    a = np.triu(rng.random((40, 40)) < 0.08, k=1)
    a = a | a.T
    g = ContactGraph(1, a)
    G = nx.from_numpy_array(a.astype(int))
    bc = nx.betweenness_centrality(G, normalized=True)
    cc = nx.closeness_centrality(G, wf_improved=True)
    assert np.allclose(betweenness(g), [bc[v] for v in range(40)], atol=1e-12)
    assert np.allclose(closeness(g), [cc[v] for v in range(40)], atol=1e-12)


def two_node_trace(pos_a, pos_b, duration):
    segs = [np.array([[0.0, duration, *pos_a]]), np.array([[0.0, duration, *pos_b]])]
    return PositionTrace(segs, float(duration))


def test_far_apart_nodes_never_connect():
    seq = build_graph_sequence(two_node_trace((25, 25), (525, 25), 3 * 86400))
    assert len(seq) == 3
    assert not any(g.adjacency.any() for g in seq)


def test_87_day_trace_gives_87_windows():
    seq = build_graph_sequence(two_node_trace((25, 25), (75, 25), 87 * 86400))
    assert len(seq) == 87
    assert [g.window for g in seq] == list(range(1, 88))
    assert all(g.adjacency[0, 1] for g in seq)


def test_window_count_is_ceiling():
    seq = build_graph_sequence(two_node_trace((0, 0), (0, 0), 2.5 * 86400))
    assert len(seq) == 3


def test_short_trace_is_flagged():
    seq = build_graph_sequence(two_node_trace((0, 0), (0, 0), 3600))
    assert len(seq) == 1 and seq.truncated


def test_empty_trace_raises():
    with pytest.raises(TraceError):
        build_graph_sequence(PositionTrace([], 0.0))


def test_brief_meeting_creates_edge_only_in_its_window():
    day = 86400
    a = np.array([[0, day + 100, 25, 25], [day + 100, day + 200, 1000, 1000], [day + 200, 3 * day, 25, 25]], float)
    b = np.array([[0, 3 * day, 1030, 1040]], float)
    seq = build_graph_sequence(PositionTrace([a, b], 3 * day))
    assert [bool(g.adjacency[0, 1]) for g in seq] == [False, True, False]
    strict = build_graph_sequence(PositionTrace([a, b], 3 * day), min_contact_s=101)
    assert not any(g.adjacency.any() for g in strict)


def test_exact_radius_counts_as_contact():
    seq = build_graph_sequence(two_node_trace((25, 25), (125, 25), 86400))
    assert seq.graphs[0].adjacency[0, 1]


def random_trace(rng, n=6, duration=2 * 86400):
    segs = []
    for _ in range(n):
        cuts = np.sort(rng.choice(np.arange(1, duration), size=4, replace=False)).astype(float)
        bounds = np.concatenate([[0.0], cuts, [float(duration)]])
        pos = rng.uniform(0, 400, size=(5, 2)).round(3)
        segs.append(np.column_stack([bounds[:-1], bounds[1:], pos]))
    return PositionTrace(segs, float(duration))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r1=st.floats(1, 300), extra=st.floats(0, 300))
def test_radius_monotonicity_and_symmetry(seed, r1, extra):
    trace = random_trace(np.random.default_rng(seed))
    small = build_graph_sequence(trace, contact_radius=r1)
    big = build_graph_sequence(trace, contact_radius=r1 + extra)
    for gs, gb in zip(small, big):
        assert np.array_equal(gs.adjacency, gs.adjacency.T)
        assert not gs.adjacency.diagonal().any()
        assert np.all(gb.adjacency[gs.adjacency])


def brute_force_edges(trace, window, radius, t0, t1):
    """Sample positions at every segment boundary inside the window."""
    n = trace.n_nodes
    times = sorted({t for seg in trace.segments for t in seg[:, 0] if t0 <= t < t1} | {t0})
    adj = np.zeros((n, n), dtype=bool)
    for t in times:
        pos = [trace.position_at(v, t) for v in range(n)]
        for u in range(n):
            for v in range(u + 1, n):
                if math.dist(pos[u], pos[v]) <= radius:
                    adj[u, v] = adj[v, u] = True
    return adj


def test_matches_boundary_sampling_oracle():
    rng = np.random.default_rng(11)
    for _ in range(10):
        trace = random_trace(rng)
        seq = build_graph_sequence(trace, contact_radius=150)
        for g in seq:
            t0 = (g.window - 1) * 86400
            expected = brute_force_edges(trace, g.window, 150, t0, t0 + 86400)
            assert np.array_equal(g.adjacency, expected)
