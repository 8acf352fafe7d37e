"""PPMI matrices from walk corpora and temporally aligned low-rank embeddings.

The embedding sequence minimizes

    L = sum_t 1/2 ||Y_t - U_t U_t^T||_F^2
        + lam/2 sum_t ||U_t||_F^2
        + tau/2 sum_{t>=2} ||U_t - U_{t-1}||_F^2

by block-coordinate descent over windows with a backtracking line search,
so the loss never increases between sweeps.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    pass


def cooccurrence_counts(walks, n_nodes, radius=5) -> np.ndarray:
    """Symmetric co-occurrence counts within ``radius`` positions.

    ``walks`` is a WalkCorpus or any iterable of node-id sequences. Both
    orders of each position pair are counted; a node paired with itself at
    two positions lands on the diagonal.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    walks = list(getattr(walks, "walks", walks))
    counts = np.zeros((n_nodes, n_nodes))
    if not walks:
        return counts
    width = max(len(w) for w in walks)
    pad = np.full((len(walks), width), -1, dtype=np.int64)
    for i, w in enumerate(walks):
        pad[i, :len(w)] = w
    for k in range(1, min(radius, width - 1) + 1):
        a, b = pad[:, :-k].ravel(), pad[:, k:].ravel()
        ok = (a >= 0) & (b >= 0)
        np.add.at(counts, (a[ok], b[ok]), 1.0)
        np.add.at(counts, (b[ok], a[ok]), 1.0)
    return counts


def ppmi(counts) -> np.ndarray:
    """Positive pointwise mutual information with natural logs."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    out = np.zeros_like(counts)
    if total <= 0:
        return out
    row = counts.sum(axis=1)
    nz = counts > 0
    i, j = np.nonzero(nz)
    out[i, j] = np.maximum(0.0, np.log(counts[i, j] * total / (row[i] * row[j])))
    return out


def objective(Y_seq, U_seq, lam, tau) -> float:
    if len(Y_seq) != len(U_seq):
        raise ValueError(f"{len(Y_seq)} PPMI matrices but {len(U_seq)} embeddings")
    total = 0.0
    for t, (Y, U) in enumerate(zip(Y_seq, U_seq)):
        if Y.shape != (U.shape[0], U.shape[0]):
            raise ValueError(f"window {t}: Y is {Y.shape}, U is {U.shape}")
        total += 0.5 * np.sum((Y - U @ U.T) ** 2) + 0.5 * lam * np.sum(U * U)
        if t > 0:
            if U.shape != U_seq[t - 1].shape:
                raise ValueError(f"window {t}: embedding shape changed")
            total += 0.5 * tau * np.sum((U - U_seq[t - 1]) ** 2)
    return float(total)


@dataclass
class FitOptions:
    max_sweeps: int = 200
    rtol: float = 1e-6
    step0: float = 1e-2
    inner_steps: int = 5
    max_halvings: int = 60


@dataclass
class EmbeddingSequence:
    U: list
    d: int
    lam: float
    tau: float
    losses: list = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.U)

    def as_array(self) -> np.ndarray:
        return np.stack(self.U)


def _block_loss(Y, U, left, right, lam, tau):
    val = 0.5 * np.sum((Y - U @ U.T) ** 2) + 0.5 * lam * np.sum(U * U)
    if left is not None:
        val += 0.5 * tau * np.sum((U - left) ** 2)
    if right is not None:
        val += 0.5 * tau * np.sum((U - right) ** 2)
    return val


def _block_grad(Y, U, left, right, lam, tau):
    g = 2.0 * (U @ (U.T @ U) - Y @ U) + lam * U
    if left is not None:
        g += tau * (U - left)
    if right is not None:
        g += tau * (U - right)
    return g


def _update_block(Y, U, left, right, lam, tau, opts):
    cur = _block_loss(Y, U, left, right, lam, tau)
    for _ in range(opts.inner_steps):
        g = _block_grad(Y, U, left, right, lam, tau)
        if not np.any(g):
            break
        step = opts.step0
        for _ in range(opts.max_halvings):
            cand = U - step * g
            val = _block_loss(Y, cand, left, right, lam, tau)
            if val < cur:
                U, cur = cand, val
                break
            step *= 0.5
        else:
            break
    return U


def fit(Y_seq, d, lam=50.0, tau=15.0, opts=None, rng=None) -> EmbeddingSequence:
    """Fit one n x d embedding per window.

    A sweep updates windows 1..T and then T..1, each by a few line-searched
    gradient steps on L with the other windows fixed. Stops when the relative
    loss change over a sweep drops below ``opts.rtol``.
    """
    opts = opts or FitOptions()
    rng = rng if rng is not None else np.random.default_rng(0)
    Y_seq = [np.asarray(Y, dtype=float) for Y in Y_seq]
    if not Y_seq:
        raise ValueError("no windows to embed")
    n = Y_seq[0].shape[0]
    for t, Y in enumerate(Y_seq):
        if Y.shape != (n, n):
            raise ValueError(f"window {t}: expected {n}x{n}, got {Y.shape}")
        if not np.allclose(Y, Y.T):
            raise ValueError(f"window {t}: Y must be symmetric")
    if not 1 <= d <= n:
        raise ValueError(f"d must be in [1, {n}], got {d}")
    T = len(Y_seq)
    U = [rng.standard_normal((n, d)) / np.sqrt(d) for _ in range(T)]
    loss = objective(Y_seq, U, lam, tau)
    if not np.isfinite(loss):
        raise DivergenceError("non-finite loss at initialization")
    losses = [loss]
    order = list(range(T)) + list(range(T - 1, -1, -1))
    converged = False
    for sweep in range(opts.max_sweeps):
        for t in order:
            left = U[t - 1] if t > 0 else None
            right = U[t + 1] if t < T - 1 else None
            U[t] = _update_block(Y_seq[t], U[t], left, right, lam, tau, opts)
        new = objective(Y_seq, U, lam, tau)
        if not np.isfinite(new):
            raise DivergenceError(f"non-finite loss at sweep {sweep + 1}")
        if new > loss * (1 + 1e-12):
            raise DivergenceError(f"loss increased at sweep {sweep + 1}: {loss} -> {new}")
        losses.append(new)
        change = (loss - new) / max(loss, np.finfo(float).tiny)
        loss = new
        if change < opts.rtol:
            converged = True
            break
    log.debug("fit: %d sweeps, final loss %.6g", len(losses) - 1, loss)
    return EmbeddingSequence(U, d, lam, tau, losses, converged)
