"""
From positions to daily contact graphs
======================================

Two nodes share an edge in a window if they were within the contact
radius at some instant of that window.
"""

import numpy as np

from mobembed.contact import build_graph_sequence, topology_metrics
from mobembed.grm import DAY, TraceConfig, generate_trace

trace, _, _ = generate_trace(TraceConfig(n_nodes=30, n_groups=120, sim_duration=7 * DAY, seed=2))
seq = build_graph_sequence(trace, window_duration=DAY, contact_radius=100)

for g in seq:
    print(f"day {g.window}: {len(g.edges())} edges")

# the five topology metrics for one window
m = topology_metrics(seq.graphs[0])
for name, values in m.items():
    print(f"{name:12s} mean {np.mean(values):.3f}  max {np.max(values):.3f}")

# a stricter rule: the pair must overlap for at least 10 minutes
strict = build_graph_sequence(trace, min_contact_s=600)
print("edges with >= 10 min contact:", sum(len(g.edges()) for g in strict),
      "vs", sum(len(g.edges()) for g in seq))
