"""Node mobility and connectivity importance from dynamic node embeddings.

Pipeline stages, each usable on its own:

- ``grm``: synthetic group-meeting mobility traces
- ``contact``: per-window contact graphs and topological baselines
- ``walks``: node2vec-style biased random walks per window
- ``embed``: PPMI matrices and temporally aligned low-rank embeddings
- ``metrics``: cosine-distance mobility, vector-norm importance, CV, z-scores,
  Pearson correlations
- ``pipeline`` / ``cli``: persisted CSV stages and the ``mobembed`` command
"""

__version__ = "0.1.0"

from .contact import (  # noqa: E402
    ContactGraph, GraphSequence, betweenness, build_graph_sequence, closeness,
    clustering_coefficient, degree, eigenvector_centrality, topology_metrics,
)
from .embed import EmbeddingSequence, FitOptions, cooccurrence_counts, fit, objective, ppmi  # noqa: E402
from .grm import TraceConfig, generate_trace  # noqa: E402
from .metrics import (  # noqa: E402
    correlation_report, cosine_distance, cv, mobility_series, node_stats, pearson,
    vector_norms, zscore_by_window,
)
from .walks import WalkCorpus, WalkParams, sample_walks, step_weights  # noqa: E402
