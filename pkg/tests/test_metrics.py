import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mobembed.metrics import (
    HIGH_CV, correlation_report, cosine_distance, cv, mobility_series, node_correlation_matrix,
    node_stats, pearson, rowwise_cosine_distance, vector_norms, window_pairs, zscore_by_window,
)

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def test_cosine_examples():
    assert cosine_distance([3, 4], [3, 4]) == pytest.approx(0, abs=1e-15)
    assert cosine_distance([1, 0], [0, 2]) == 1.0
    assert cosine_distance([1, 0], [1, 1]) == pytest.approx(1 - 1 / math.sqrt(2))
    assert cosine_distance([1, 0], [-1, 0]) == 2.0
    assert cosine_distance([0, 0], [1, 0]) == 1.0
    with pytest.raises(ValueError):
        cosine_distance([1, 0], [1, 0, 0])


def test_rowwise_flags_zero_rows():
    d, deg = rowwise_cosine_distance([[0, 0], [1, 0]], [[1, 1], [1, 0]])
    assert d.tolist() == [1.0, 0.0]
    assert deg.tolist() == [True, False]


@settings(max_examples=300, deadline=None)
@given(x=arrays(float, 5, elements=finite), y=arrays(float, 5, elements=finite),
       a=st.floats(1e-3, 1e3), b=st.floats(1e-3, 1e3))
def test_cosine_properties(x, y, a, b):
    d = cosine_distance(x, y)
    assert 0 <= d <= 2
    assert d == cosine_distance(y, x)
    assert cosine_distance(a * x, b * y) == pytest.approx(d, abs=1e-12)


def test_series_lengths():
    E = np.random.default_rng(0).standard_normal((87, 4, 3))
    assert len(mobility_series(E, 1, "consecutive")) == 86
    s = mobility_series(E, 1, "forward")
    assert len(s) == math.comb(87, 2) == 3741
    assert (s.pairs[:, 0] < s.pairs[:, 1]).all() and s.pairs.min() == 1
    with pytest.raises(ValueError):
        window_pairs(3, "sideways")


def test_static_node_has_zero_mobility():
    E = np.tile(np.array([[1.0, 2.0], [3.0, -1.0]]), (5, 1, 1))
    assert np.allclose(mobility_series(E, 0).distances, 0)


def test_cv_examples():
    assert cv([4, 4, 4]) == 0
    assert cv([1, 3]) == 50.0
    assert math.isnan(cv([5]))
    assert math.isnan(cv([-1, 1]))
    assert cv([[1, 3], [2, 2]], axis=1).tolist() == [50.0, 0.0]
    assert HIGH_CV == 30


def test_pearson_examples():
    x = np.array([1.0, 2.0, 3.0, 5.0])
    assert pearson(x, 2 * x + 1)[0] == pytest.approx(1.0)
    assert pearson(x, -x)[0] == pytest.approx(-1.0)
    assert pearson([1, 2, 3], [1, 2, 4])[0] == pytest.approx(9 / math.sqrt(84))
    r, p = pearson([1, 1, 1], [1, 2, 3])
    assert math.isnan(r) and math.isnan(p)
    with pytest.raises(ValueError):
        pearson([1, 2], [1, 2])


def test_pearson_p_value_against_scipy():
    from scipy import stats
    rng = np.random.default_rng(0)
    x, y = rng.random(20), rng.random(20)
    ref = stats.pearsonr(x, y)
    r, p = pearson(x, y)
    assert r == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9)


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(0.01, 100), b=finite)
def test_pearson_affine_invariance(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(12), rng.standard_normal(12)
    r = pearson(x, y)[0]
    assert pearson(a * x + b, y)[0] == pytest.approx(r, abs=1e-12)
    assert -1 <= r <= 1


def test_zscore_examples():
    z, flat = zscore_by_window([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]])
    assert z[:, 0] == pytest.approx([-1.2247449, 0, 1.2247449])
    assert z[:, 1].tolist() == [0, 0, 0]
    assert flat.tolist() == [False, True]


@settings(max_examples=200, deadline=None)
@given(m=arrays(float, (6, 4), elements=finite))
def test_zscore_moments(m):
    z, flat = zscore_by_window(m)
    live = ~flat & (m.std(axis=0) > 1e-6)
    assert np.allclose(z[:, live].mean(axis=0), 0, atol=1e-9)
    assert np.allclose(z[:, live].std(axis=0), 1, atol=1e-9)


def test_norms_and_node_stats():
    E = np.zeros((3, 2, 2))
    E[:, 0] = [[3, 4], [6, 8], [3, 4]]
    E[:, 1] = [[1, 0], [0, 1], [-1, 0]]
    assert vector_norms(E).tolist() == [[5, 10, 5], [1, 1, 1]]
    ns = node_stats(E, "consecutive")
    assert ns.avg_norm.tolist() == [20 / 3, 1]
    assert ns.cv_norm[1] == 0
    assert ns.avg_cosdist[0] == pytest.approx(0, abs=1e-12)
    assert ns.avg_cosdist[1] == pytest.approx(1.0)
    assert ns.high_norm_cv.tolist() == [True, False]


def test_node_correlation_matrix():
    s = np.array([[1.0, 2, 3], [2, 4, 6], [3, 2, 1]])
    r = node_correlation_matrix(s)
    assert r == pytest.approx(np.array([[1, 1, -1], [1, 1, -1], [-1, -1, 1]]))


def test_correlation_report_shapes():
    rng = np.random.default_rng(1)
    ns = node_stats(rng.standard_normal((6, 10, 3)))
    topo = {k: rng.random(10) for k in ("degree", "betweenness", "closeness", "eigenvector", "clustering")}
    t2, t3 = correlation_report(ns, topo)
    assert len(t2) == 4 and len(t3) == 10
    assert {row.metric_a for row in t3} == {"avg_cosdist", "avg_norm"}
    _, same = correlation_report(ns, {"norm": ns.avg_norm})
    assert (same[1].metric_a, same[1].metric_b) == ("avg_norm", "avg_norm")
    assert same[1].r == pytest.approx(1.0)


def test_report_blank_for_constant_series():
    ns = node_stats(np.ones((4, 5, 2)))
    t2, _ = correlation_report(ns, {})
    assert all(math.isnan(row.r) for row in t2)
