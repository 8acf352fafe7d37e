"""
PPMI matrices and aligned embeddings
====================================

Walk co-occurrences become PPMI matrices, which are factorized jointly
so consecutive windows stay comparable.
"""

import numpy as np

from mobembed.embed import cooccurrence_counts, fit, objective, ppmi

# two isolated pairs: PPMI of a pair is ln 4
c = np.zeros((4, 4))
c[0, 1] = c[1, 0] = c[2, 3] = c[3, 2] = 1
print("PPMI of a pair:", ppmi(c)[0, 1], "ln 4 =", np.log(4))

print(cooccurrence_counts([[0, 1, 0]], 2))

# a slowly drifting low-rank sequence
rng = np.random.default_rng(0)
base = rng.random((20, 3))
Y = []
for t in range(6):
    B = base + 0.05 * t
    Y.append(B @ B.T)

for tau in (0.0, 15.0, 1000.0):
    res = fit(Y, d=3, lam=1.0, tau=tau, rng=np.random.default_rng(1))
    moves = [np.linalg.norm(b - a) for a, b in zip(res.U, res.U[1:])]
    print(f"tau={tau:6.0f}: {len(res.losses) - 1:3d} sweeps, loss {res.losses[-1]:9.3f}, "
          f"mean window-to-window move {np.mean(moves):.4f}")

# the ridge term shrinks everything below lam/2 in the spectrum to zero
top = np.linalg.eigvalsh(Y[0])[-1]
for lam in (1.0, 2 * top + 10):
    res = fit(Y[:1], d=3, lam=lam, tau=0.0, rng=np.random.default_rng(1))
    print(f"lam={lam:7.1f} (top eigenvalue {top:.1f}): embedding norm {np.linalg.norm(res.U[0]):.3g}")
    print("  objective:", round(objective(Y[:1], res.U, lam, 0.0), 3))
