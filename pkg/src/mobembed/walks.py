"""Second-order biased random walks on a single contact graph."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class WalkParams:
    nw: int = 4
    wl: int = 8
    p: float = 1.0
    q: float = 0.5
    seed: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.nw < 1:
            out.append("walks.nw: must be >= 1")
        if self.wl < 2:
            out.append("walks.wl: must be >= 2")
        if not self.p > 0:
            out.append("walks.p: p must be > 0")
        if not self.q > 0:
            out.append("walks.q: q must be > 0")
        return out


@dataclass
class WalkCorpus:
    window: int
    walks: list = field(default_factory=list)
    empty: bool = False

    def __len__(self):
        return len(self.walks)


def step_weights(neighbors, prev, curr, p, q):
    """Unnormalized node2vec weights over ``neighbors[curr]`` (in that order).

    ``neighbors`` is a list of sorted neighbor lists or sets; ``prev`` is None
    on the first step, which gives uniform weights.
    """
    nb = neighbors[curr]
    if prev is None:
        return np.ones(len(nb))
    return np.array(_weights(nb, prev, set(neighbors[prev]), p, q))


def window_rng(seed: int, window: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, window]))


def sample_walks(graph, params: WalkParams, rng=None) -> WalkCorpus:
    """``params.nw`` walks of up to ``params.wl`` nodes from every non-isolated node.

    Without an explicit ``rng`` the stream is derived from ``(params.seed,
    graph.window)``, so windows can be sampled in any order.
    """
    if rng is None:
        rng = window_rng(params.seed, graph.window)
    nbrs = graph.neighbor_lists()
    nbr_sets = [set(x) for x in nbrs]
    walks = []
    for start in range(len(nbrs)):
        if not nbrs[start]:
            continue
        for _ in range(params.nw):
            walk = [start]
            prev = None
            while len(walk) < params.wl:
                curr = walk[-1]
                cand = nbrs[curr]
                if not cand:
                    break
                nxt = draw_next(nbrs, nbr_sets, prev, curr, params.p, params.q, rng)
                prev = curr
                walk.append(nxt)
            walks.append(walk)
    return WalkCorpus(graph.window, walks, empty=not walks)


def draw_next(nbrs, nbr_sets, prev, curr, p, q, rng):
    """One biased step from ``curr`` having arrived from ``prev`` (None at start)."""
    cand = nbrs[curr]
    if prev is None:
        return cand[int(rng.integers(len(cand)))]
    cum = np.cumsum(_weights(cand, prev, nbr_sets[prev], p, q))
    return cand[int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))]


def _weights(cand, prev, prev_nb, p, q):
    return [1.0 / p if x == prev else (1.0 if x in prev_nb else 1.0 / q) for x in cand]
