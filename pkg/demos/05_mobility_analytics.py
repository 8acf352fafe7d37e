"""
Mobility and importance from embeddings
=======================================

Cosine distance between a node's vectors in different windows measures
how much its neighbourhood changed; the vector norm tracks its presence.
"""

import numpy as np

from mobembed.metrics import (
    correlation_report, cv, mobility_series, node_stats, vector_norms, zscore_by_window,
)

rng = np.random.default_rng(4)
T, n, d = 10, 8, 3
E = rng.standard_normal((1, n, d)) + 0.2 * rng.standard_normal((T, n, d)).cumsum(axis=0)

s = mobility_series(E, node=0, mode="consecutive")
print("node 0, consecutive windows:", np.round(s.distances, 3))
print("forward mode pairs:", len(mobility_series(E, 0, "forward")))

norms = vector_norms(E)
print("CV of node 0 norm (%):", round(cv(norms[0]), 2))
z, flat = zscore_by_window(norms)
print("z-scored norms, window 1:", np.round(z[:, 0], 2))

ns = node_stats(E)
print("nodes with high mobility CV:", np.flatnonzero(ns.high_mobility))
t2, _ = correlation_report(ns, {})
for row in t2:
    print(f"{row.metric_a:12s} vs {row.metric_b:10s} r={row.r:+.3f} p={row.p:.3f}")
