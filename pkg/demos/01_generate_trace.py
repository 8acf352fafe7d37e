"""
Generating a group-meeting mobility trace
=========================================

Nodes sit in home cells of a 30 x 30 grid and jump to a group's venue
cell whenever they attend one of its periodic meetings.
"""

import numpy as np

from mobembed.grm import DAY, TraceConfig, generate_trace, sample_trunc_powerlaw

# a small population keeps this fast; every other field is the shipped default
cfg = TraceConfig(n_nodes=30, n_groups=120, sim_duration=14 * DAY, seed=1)
trace, meetings, social = generate_trace(cfg)

print(f"{trace.n_nodes} nodes, {len(meetings)} meetings over {trace.sim_duration / DAY:.0f} days")
print("social graph edges:", int(social.adjacency.sum() // 2), "in", len(social.clusters), "clusters")

# where is node 0 at noon on day 3?
print("node 0 at day 3 noon:", trace.position_at(0, 2.5 * DAY))

# meeting gaps are multiples of the group period
periods = np.array([ev.period for ev in meetings]) / 3600
values, counts = np.unique(periods, return_counts=True)
for v, c in zip(values, counts):
    print(f"  period {v:5.0f} h: {c} meetings")

# the gap/duration sampler on its own: power law with an exponential cutoff
rng = np.random.default_rng(0)
gaps = sample_trunc_powerlaw(3.0, 30 * DAY, 3600.0, rng, size=100_000)
print("gap quantiles (h):", np.round(np.quantile(gaps, [0.5, 0.9, 0.99]) / 3600, 2))
