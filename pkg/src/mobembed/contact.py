"""Per-window contact graphs and topological baselines."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import shortest_path


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class ContactGraph:
    window: int
    adjacency: np.ndarray  # bool, symmetric, zero diagonal

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    def edges(self):
        u, v = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(u.tolist(), v.tolist()))

    def neighbor_lists(self):
        return [np.flatnonzero(row).tolist() for row in self.adjacency]


@dataclass
class GraphSequence:
    graphs: list
    window_duration: float
    truncated: bool = False

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    @property
    def n_nodes(self) -> int:
        return self.graphs[0].n_nodes


def _flatten(trace):
    parts = []
    for v, seg in enumerate(trace.segments):
        seg = np.asarray(seg, dtype=float)
        parts.append(np.column_stack([np.full(len(seg), v, dtype=float), seg]))
    return np.vstack(parts)


def _window_edges(rows, n, radius, min_contact, chunk=512):
    """Adjacency from clipped segments ``(node, s, e, x, y)`` inside one window."""
    adj = np.zeros((n, n), dtype=bool)
    node = rows[:, 0].astype(int)
    s, e, x, y = rows[:, 1], rows[:, 2], rows[:, 3], rows[:, 4]
    r2 = radius * radius
    for i0 in range(0, len(rows), chunk):
        sl = slice(i0, i0 + chunk)
        overlap = np.minimum(e[sl, None], e[None, :]) - np.maximum(s[sl, None], s[None, :])
        close = (x[sl, None] - x[None, :]) ** 2 + (y[sl, None] - y[None, :]) ** 2 <= r2
        hit = close & (overlap > 0) & (overlap >= min_contact) & (node[sl, None] != node[None, :])
        a, b = np.nonzero(hit)
        adj[node[sl][a], node[b]] = True
    return adj | adj.T


def build_graph_sequence(trace, window_duration=86400.0, contact_radius=100.0, min_contact_s=0.0):
    """Discretize ``trace`` into non-overlapping windows of contact graphs.

    Two nodes share an edge in window t when, at some instant inside the
    window, they are at most ``contact_radius`` apart. Positions are constant
    per segment, so each overlapping segment pair is checked once.
    ``min_contact_s`` requires a single overlapping segment pair to last at
    least that long.
    """
    if window_duration <= 0:
        raise ValueError("window_duration must be > 0")
    if contact_radius <= 0:
        raise ValueError("contact_radius must be > 0")
    if trace.n_nodes == 0 or all(len(s) == 0 for s in trace.segments):
        raise TraceError("empty trace")
    n = trace.n_nodes
    duration = float(trace.sim_duration)
    n_windows = max(1, math.ceil(duration / window_duration))
    rows = _flatten(trace)
    graphs = []
    for w in range(n_windows):
        w0, w1 = w * window_duration, min((w + 1) * window_duration, duration)
        sel = rows[(rows[:, 1] < w1) & (rows[:, 2] > w0)].copy()
        sel[:, 1] = np.maximum(sel[:, 1], w0)
        sel[:, 2] = np.minimum(sel[:, 2], w1)
        graphs.append(ContactGraph(w + 1, _window_edges(sel, n, contact_radius, min_contact_s)))
    return GraphSequence(graphs, float(window_duration), truncated=duration < window_duration)


def degree(graph) -> np.ndarray:
    return graph.adjacency.sum(axis=1).astype(int)


def clustering_coefficient(graph) -> np.ndarray:
    """Local clustering; nodes with degree < 2 get 0."""
    a = graph.adjacency.astype(float)
    tri = np.einsum("ij,jk,ki->i", a, a, a) / 2.0
    k = a.sum(axis=1)
    pairs = k * (k - 1) / 2.0
    out = np.zeros_like(k)
    np.divide(tri, pairs, out=out, where=pairs > 0)
    return out


def betweenness(graph) -> np.ndarray:
    """Brandes shortest-path betweenness, normalized by (n-1)(n-2)/2."""
    nbrs = graph.neighbor_lists()
    n = len(nbrs)
    bc = np.zeros(n)
    for s in range(n):
        if not nbrs[s]:
            continue
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    if n < 3:
        return np.zeros(n)
    # every unordered pair was accumulated from both endpoints
    return bc / 2.0 / ((n - 1) * (n - 2) / 2.0)


def closeness(graph) -> np.ndarray:
    """Closeness with Wasserman-Faust component scaling; isolated nodes get 0."""
    n = graph.n_nodes
    if n < 2:
        return np.zeros(n)
    dist = shortest_path(graph.adjacency.astype(float), method="D", unweighted=True, directed=False)
    reach = np.isfinite(dist)
    c = reach.sum(axis=1)  # component size, self included
    total = np.where(reach, dist, 0.0).sum(axis=1)
    out = np.zeros(n)
    ok = total > 0
    out[ok] = ((c[ok] - 1) / (n - 1)) * ((c[ok] - 1) / total[ok])
    return out


class EigenResult(NamedTuple):
    values: np.ndarray
    converged: bool
    n_iter: int


def eigenvector_centrality(graph, tol=1e-10, max_iter=1000) -> EigenResult:
    """Principal adjacency eigenvector by power iteration on A + I/2.

    Starts from the uniform vector, so on a disconnected graph the result is
    the projection of that vector onto the leading eigenspace. The identity
    shift breaks the +/- lambda tie of bipartite graphs.
    """
    a = graph.adjacency.astype(float)
    n = a.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    if not a.any():
        return EigenResult(x, True, 0)
    m = a + 0.5 * np.eye(n)
    for it in range(1, max_iter + 1):
        nxt = m @ x
        nxt /= np.linalg.norm(nxt)
        if np.max(np.abs(nxt - x)) < tol:
            return EigenResult(np.maximum(nxt, 0.0), True, it)
        x = nxt
    return EigenResult(np.maximum(x, 0.0), False, max_iter)


TOPOLOGY_FIELDS = ("degree", "betweenness", "closeness", "eigenvector", "clustering")


def topology_metrics(graph) -> dict:
    """All five baselines for one window, keyed by TOPOLOGY_FIELDS."""
    return {
        "degree": degree(graph),
        "betweenness": betweenness(graph),
        "closeness": closeness(graph),
        "eigenvector": eigenvector_centrality(graph).values,
        "clustering": clustering_coefficient(graph),
    }
