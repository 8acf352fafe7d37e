"""
Biased random walks on one window
=================================

With p=1 and q=0.5 the walk prefers stepping away from where it came from.
"""

import numpy as np

from mobembed.contact import ContactGraph
from mobembed.walks import WalkParams, sample_walks, step_weights

# a square with one diagonal
adj = np.zeros((4, 4), dtype=bool)
for u, v in [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]:
    adj[u, v] = adj[v, u] = True
g = ContactGraph(window=1, adjacency=adj)
nb = g.neighbor_lists()

# coming from 1 into 0: 1 is the previous node, 2 is adjacent to it, 3 is not
w = step_weights(nb, prev=1, curr=0, p=1.0, q=0.5)
print("neighbors of 0:", nb[0], "weights:", w, "probabilities:", np.round(w / w.sum(), 3))

corpus = sample_walks(g, WalkParams(nw=2, wl=8, seed=3))
for walk in corpus.walks:
    print(" ".join(map(str, walk)))
