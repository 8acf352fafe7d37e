"""Embedding-derived mobility and importance analytics.

Undefined statistics (zero mean, zero variance, too few values) come back as
NaN rather than raising, so per-node tables stay total on sparse windows.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

HIGH_CV = 30.0


def cosine_distance(x, y) -> float:
    """1 - cos(x, y), in [0, 2]. A zero vector on either side gives 1.0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return 1.0
    return float(np.clip(1.0 - np.dot(x, y) / (nx * ny), 0.0, 2.0))


def rowwise_cosine_distance(X, Y):
    """Cosine distance between matching rows; returns (values, degenerate)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    nx = np.linalg.norm(X, axis=-1)
    ny = np.linalg.norm(Y, axis=-1)
    degenerate = (nx == 0) | (ny == 0)
    denom = np.where(degenerate, 1.0, nx * ny)
    out = np.clip(1.0 - np.sum(X * Y, axis=-1) / denom, 0.0, 2.0)
    out[degenerate] = 1.0
    return out, degenerate


@dataclass
class MobilitySeries:
    node: int
    mode: str
    pairs: np.ndarray  # (m, 2) window indices, 1-based, i < j
    distances: np.ndarray
    degenerate: np.ndarray

    def __len__(self):
        return len(self.distances)


def window_pairs(n_windows, mode="forward"):
    if mode == "consecutive":
        i = np.arange(n_windows - 1)
        return np.column_stack([i, i + 1])
    if mode == "forward":
        i, j = np.triu_indices(n_windows, k=1)
        return np.column_stack([i, j])
    raise ValueError(f"unknown mode {mode!r}; expected 'consecutive' or 'forward'")


def mobility_series(embeddings, node, mode="forward") -> MobilitySeries:
    """Cosine distances of one node's embedding across window pairs.

    ``embeddings`` is an EmbeddingSequence, a list of n x d arrays or a
    (T, n, d) array.
    """
    E = _stack(embeddings)
    if not 0 <= node < E.shape[1]:
        raise IndexError(f"node {node} outside 0..{E.shape[1] - 1}")
    pairs = window_pairs(E.shape[0], mode)
    rows = E[:, node, :]
    dist, deg = rowwise_cosine_distance(rows[pairs[:, 0]], rows[pairs[:, 1]])
    return MobilitySeries(node, mode, pairs + 1, dist, deg)


def all_mobility(embeddings, mode="forward"):
    """(n_nodes, n_pairs) cosine distances for every node at once."""
    E = _stack(embeddings)
    pairs = window_pairs(E.shape[0], mode)
    dist, deg = rowwise_cosine_distance(E[pairs[:, 0]], E[pairs[:, 1]])
    return dist.T, deg.T


def vector_norms(embeddings) -> np.ndarray:
    """(n_nodes, n_windows) L2 norms of each node's row."""
    return np.linalg.norm(_stack(embeddings), axis=-1).T


def _stack(embeddings):
    U = getattr(embeddings, "U", embeddings)
    return np.asarray(U if isinstance(U, np.ndarray) else np.stack(U), dtype=float)


def cv(values, axis=None):
    """Coefficient of variation in percent, population standard deviation.

    NaN where the mean is zero or fewer than two values are given.
    """
    v = np.asarray(values, dtype=float)
    count = v.size if axis is None else v.shape[axis]
    mean = v.mean(axis=axis)
    sd = v.std(axis=axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where((mean != 0) & (count >= 2), 100.0 * sd / mean, np.nan)
    return float(out) if np.ndim(out) == 0 else out


def pearson(x, y):
    """Product-moment r and its two-sided p-value (t test, len - 2 dof).

    Returns (nan, nan) when either series is constant; raises on unequal
    lengths or fewer than three points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-d series of equal length")
    n = len(x)
    if n < 3:
        raise ValueError("pearson needs at least 3 points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        return float("nan"), float("nan")
    r = float(np.clip(np.dot(dx, dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * stats.t.sf(abs(t), n - 2))


def zscore_by_window(norms):
    """Column-wise z-score of a node x window matrix.

    Returns (z, flat) where ``flat`` marks zero-variance columns, which are
    set to 0.
    """
    m = np.asarray(norms, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2:
        raise ValueError("need a 2-d matrix with at least 2 rows")
    mean = m.mean(axis=0)
    sd = m.std(axis=0)
    flat = sd == 0
    z = np.zeros_like(m)
    ok = ~flat
    z[:, ok] = (m[:, ok] - mean[ok]) / sd[ok]
    return z, flat


def node_correlation_matrix(series):
    """Pairwise Pearson r between rows; NaN for constant rows."""
    s = np.asarray(series, dtype=float)
    d = s - s.mean(axis=1, keepdims=True)
    norm = np.sqrt(np.sum(d * d, axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (d @ d.T) / np.outer(norm, norm)
    return np.clip(r, -1.0, 1.0)


@dataclass
class NodeStats:
    avg_cosdist: np.ndarray
    cv_cosdist: np.ndarray
    avg_norm: np.ndarray
    cv_norm: np.ndarray

    @property
    def high_mobility(self):
        return self.cv_cosdist > HIGH_CV

    @property
    def high_norm_cv(self):
        return self.cv_norm > HIGH_CV


def node_stats(embeddings, mode="forward") -> NodeStats:
    dist, _ = all_mobility(embeddings, mode)
    norms = vector_norms(embeddings)
    return NodeStats(dist.mean(axis=1), cv(dist, axis=1), norms.mean(axis=1), cv(norms, axis=1))


EMBEDDING_PAIRS = (
    ("avg_cosdist", "cv_cosdist"),
    ("avg_cosdist", "cv_norm"),
    ("avg_norm", "cv_cosdist"),
    ("avg_norm", "cv_norm"),
)


@dataclass
class CorrelationRow:
    metric_a: str
    metric_b: str
    r: float
    p: float


def correlation_report(ns: NodeStats, topology: dict):
    """Embedding-vs-embedding and embedding-vs-topology correlation tables.

    ``topology`` maps metric name (degree, betweenness, ...) to per-node
    time averages. Undefined correlations carry NaN.
    """
    emb = {k: getattr(ns, k) for k in ("avg_cosdist", "cv_cosdist", "avg_norm", "cv_norm")}
    embedding_rows = [CorrelationRow(a, b, *_safe_pearson(emb[a], emb[b])) for a, b in EMBEDDING_PAIRS]
    topology_rows = []
    for a in ("avg_cosdist", "avg_norm"):
        for name, values in topology.items():
            topology_rows.append(CorrelationRow(a, f"avg_{name}", *_safe_pearson(emb[a], values)))
    return embedding_rows, topology_rows


def _safe_pearson(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 3:
        return float("nan"), float("nan")
    return pearson(x[ok], y[ok])
