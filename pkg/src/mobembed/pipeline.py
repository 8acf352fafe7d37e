"""Stage orchestration with persisted CSV/text intermediates.

Layout under ``out_dir``::

    trace/     trace.csv, meetings.csv
    graphs/    edges.csv, topology.csv
    walks/     walks_<t>.txt
    embed/     emb_<t>.csv, loss.csv[, ppmi.csv]
    analyze/   node_stats.csv, heatmap_norm_zscore.csv, pearson_nodes.csv, correlations.csv

Every stage directory also holds a ``manifest.json`` with the config hash,
seed, input/output hashes and library versions. Manifests carry no
timestamps, so reruns with unchanged inputs are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from . import io
from .config import PipelineConfig
from .contact import (
    betweenness, build_graph_sequence, closeness, clustering_coefficient, degree,
    eigenvector_centrality,
)
from .embed import cooccurrence_counts, fit, ppmi
from .grm import generate_trace
from .metrics import (
    correlation_report, node_correlation_matrix, node_stats, vector_norms, zscore_by_window,
)
from .walks import WalkCorpus, sample_walks

log = logging.getLogger("mobembed")

STAGES = ("generate", "graphs", "walks", "embed", "analyze")
STAGE_DIRS = {"generate": "trace", "graphs": "graphs", "walks": "walks", "embed": "embed", "analyze": "analyze"}
STAGE_SECTIONS = {
    "generate": ("trace",),
    "graphs": ("graphs",),
    "walks": ("walks",),
    "embed": ("embed",),
    "analyze": ("analyze",),
}


class MissingArtifactError(io.ValidationError):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def stage_dir(cfg, stage) -> str:
    return os.path.join(cfg.out_dir, STAGE_DIRS[stage])


def _rel(cfg, path):
    return os.path.relpath(path, cfg.out_dir).replace(os.sep, "/")


def _write_manifest(cfg, stage, inputs, outputs, meta):
    manifest = {
        "stage": stage,
        "seed": cfg.seed,
        "config_hash": cfg.section_hash(*STAGE_SECTIONS[stage]),
        "inputs": {_rel(cfg, p): sha256_file(p) for p in sorted(inputs)},
        "outputs": {_rel(cfg, p): sha256_file(p) for p in sorted(outputs)},
        "versions": {
            "mobembed": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "meta": meta,
    }
    path = os.path.join(stage_dir(cfg, stage), "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def read_manifest(cfg, stage) -> dict:
    path = os.path.join(stage_dir(cfg, stage), "manifest.json")
    if not os.path.exists(path):
        raise MissingArtifactError(
            f"{stage} artifacts not found in {stage_dir(cfg, stage)}; run `mobembed {stage}` first")
    with open(path) as fh:
        return json.load(fh)


def _map(cfg, func, items):
    if cfg.threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(func, items))


def run_generate(cfg: PipelineConfig) -> dict:
    out = stage_dir(cfg, "generate")
    os.makedirs(out, exist_ok=True)
    trace, meetings, _ = generate_trace(cfg.trace)
    problems = trace.problems(bounds=(cfg.trace.grid_cols * cfg.trace.cell_side,
                                      cfg.trace.grid_rows * cfg.trace.cell_side))
    if problems:
        raise RuntimeError("generated trace violates invariants: " + "; ".join(problems[:5]))
    paths = [os.path.join(out, "trace.csv"), os.path.join(out, "meetings.csv")]
    io.write_trace(paths[0], trace)
    io.write_meetings(paths[1], meetings)
    meta = {
        "n_nodes": trace.n_nodes,
        "sim_duration_s": trace.sim_duration,
        "n_meetings": len(meetings),
        "n_segments": int(sum(len(s) for s in trace.segments)),
    }
    return _write_manifest(cfg, "generate", [], paths, meta)


def run_graphs(cfg: PipelineConfig) -> dict:
    trace_path = os.path.join(stage_dir(cfg, "generate"), "trace.csv")
    if not os.path.exists(trace_path):
        raise MissingArtifactError(f"{trace_path} not found; run `mobembed generate` first "
                                   "or place a trace CSV there")
    trace = io.read_trace(trace_path)
    g = cfg.graphs
    seq = build_graph_sequence(trace, g.window_duration, g.contact_radius, g.min_contact_s)
    if seq.truncated:
        log.warning("graphs: trace shorter than one window; single truncated window")
    out = stage_dir(cfg, "graphs")
    os.makedirs(out, exist_ok=True)

    def metrics(graph):
        eig = eigenvector_centrality(graph)
        if not eig.converged:
            log.warning("graphs: eigenvector centrality did not converge in window %d (%d iterations)",
                        graph.window, eig.n_iter)
        m = {
            "degree": degree(graph),
            "betweenness": betweenness(graph),
            "closeness": closeness(graph),
            "eigenvector": eig.values,
            "clustering": clustering_coefficient(graph),
        }
        return m, eig.converged

    results = _map(cfg, metrics, seq.graphs)
    paths = [os.path.join(out, "edges.csv"), os.path.join(out, "topology.csv")]
    io.write_edges(paths[0], seq)
    io.write_topology(paths[1], [m for m, _ in results])
    meta = {
        "n_nodes": seq.n_nodes,
        "n_windows": len(seq),
        "window_duration_s": seq.window_duration,
        "truncated": seq.truncated,
        "edges_per_window": [len(gr.edges()) for gr in seq],
        "eigenvector_unconverged_windows": [gr.window for gr, (_, ok) in zip(seq, results) if not ok],
    }
    return _write_manifest(cfg, "graphs", [trace_path], paths, meta)


def _load_graphs(cfg):
    meta = read_manifest(cfg, "graphs")["meta"]
    path = os.path.join(stage_dir(cfg, "graphs"), "edges.csv")
    seq = io.read_edges(path, meta["n_nodes"], meta["n_windows"], meta["window_duration_s"])
    return seq, meta, path


def run_walks(cfg: PipelineConfig) -> dict:
    seq, meta, edges_path = _load_graphs(cfg)
    out = stage_dir(cfg, "walks")
    os.makedirs(out, exist_ok=True)
    for name in os.listdir(out):
        if name.startswith("walks_"):
            os.remove(os.path.join(out, name))
    corpora = _map(cfg, lambda gr: sample_walks(gr, cfg.walks), seq.graphs)
    paths = []
    for corpus in corpora:
        if corpus.empty:
            log.warning("walks: window %d has no edges; empty corpus", corpus.window)
        path = os.path.join(out, io.walks_filename(corpus.window))
        io.write_walks(path, corpus)
        paths.append(path)
    meta_out = {
        "n_nodes": meta["n_nodes"],
        "n_windows": meta["n_windows"],
        "walks_per_window": [len(c) for c in corpora],
        "empty_windows": [c.window for c in corpora if c.empty],
    }
    return _write_manifest(cfg, "walks", [edges_path], paths, meta_out)


def run_embed(cfg: PipelineConfig) -> dict:
    wmeta = read_manifest(cfg, "walks")["meta"]
    n, T = wmeta["n_nodes"], wmeta["n_windows"]
    wdir = stage_dir(cfg, "walks")
    found = io.window_files(wdir, "walks_", ".txt")
    missing = [t for t in range(1, T + 1) if t not in found]
    if missing:
        raise MissingArtifactError(f"walk files missing for windows {missing[:10]}; rerun `mobembed walks`")
    e = cfg.embed
    if e.d > n:
        raise io.ValidationError(f"embed.d={e.d} exceeds the {n} nodes in the walks")

    def build(t):
        walks = io.read_walks(found[t], n)
        return ppmi(cooccurrence_counts(WalkCorpus(t, walks), n, e.context_radius))

    Y = _map(cfg, build, range(1, T + 1))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0, 0xEB]))
    result = fit(Y, e.d, e.lam, e.tau, e.fit_options(), rng)
    out = stage_dir(cfg, "embed")
    os.makedirs(out, exist_ok=True)
    for name in os.listdir(out):
        if name.startswith("emb_") or name == "ppmi.csv":
            os.remove(os.path.join(out, name))
    paths = []
    for t, U in enumerate(result.U, start=1):
        path = os.path.join(out, io.emb_filename(t))
        io.write_embedding(path, U)
        paths.append(path)
    paths.append(os.path.join(out, "loss.csv"))
    io.write_losses(paths[-1], result.losses)
    if e.dump_ppmi:
        paths.append(os.path.join(out, "ppmi.csv"))
        io.write_ppmi(paths[-1], Y)
    meta = {
        "n_nodes": n,
        "n_windows": T,
        "sweeps": len(result.losses) - 1,
        "final_loss": result.losses[-1],
        "converged": result.converged,
    }
    return _write_manifest(cfg, "embed", [found[t] for t in range(1, T + 1)], paths, meta)


def run_analyze(cfg: PipelineConfig) -> dict:
    emeta = read_manifest(cfg, "embed")["meta"]
    gmeta = read_manifest(cfg, "graphs")["meta"]
    n, T = emeta["n_nodes"], emeta["n_windows"]
    if (gmeta["n_nodes"], gmeta["n_windows"]) != (n, T):
        raise io.ValidationError("graphs and embed stages disagree on node/window counts; rerun `mobembed all`")
    edir = stage_dir(cfg, "embed")
    found = io.window_files(edir, "emb_", ".csv")
    missing = [t for t in range(1, T + 1) if t not in found]
    if missing:
        raise MissingArtifactError(f"embedding files missing for windows {missing[:10]}; rerun `mobembed embed`")
    U = [io.read_embedding(found[t]) for t in range(1, T + 1)]
    topo_path = os.path.join(stage_dir(cfg, "graphs"), "topology.csv")
    topo = io.read_topology(topo_path, n, T)
    a = cfg.analyze

    ns = node_stats(U, a.cosine_mode)
    norms = vector_norms(U)
    z, flat = zscore_by_window(norms)
    if flat.any():
        log.warning("analyze: %d windows have constant norms; z-scores set to 0", int(flat.sum()))
    pear = node_correlation_matrix(norms)
    embedding_rows, topology_rows = correlation_report(ns, {k: v.mean(axis=0) for k, v in topo.items()})

    out = stage_dir(cfg, "analyze")
    os.makedirs(out, exist_ok=True)
    paths = [os.path.join(out, f) for f in
             ("node_stats.csv", "heatmap_norm_zscore.csv", "pearson_nodes.csv", "correlations.csv")]
    io.write_node_stats(paths[0], ns, a.cv_threshold)
    io.write_matrix(paths[1], z, "node", [f"w{t}" for t in range(1, T + 1)])
    io.write_matrix(paths[2], pear, "node", [str(v) for v in range(n)])
    io.write_correlations(paths[3], embedding_rows + topology_rows)

    def top5(values):
        order = sorted(range(n), key=lambda v: (-values[v], v))
        return [int(v) for v in order[:5]]

    meta = {
        "n_nodes": n,
        "n_windows": T,
        "cosine_mode": a.cosine_mode,
        "top5_avg_norm": top5(np.nan_to_num(ns.avg_norm, nan=-np.inf)),
        "top5_avg_cosdist": top5(np.nan_to_num(ns.avg_cosdist, nan=-np.inf)),
        "frac_high_cv_norm": float(np.mean(ns.cv_norm > a.cv_threshold)),
        "frac_high_cv_cosdist": float(np.mean(ns.cv_cosdist > a.cv_threshold)),
    }
    inputs = [found[t] for t in range(1, T + 1)] + [topo_path]
    return _write_manifest(cfg, "analyze", inputs, paths, meta)


RUNNERS = {
    "generate": run_generate,
    "graphs": run_graphs,
    "walks": run_walks,
    "embed": run_embed,
    "analyze": run_analyze,
}


def run_stage(stage: str, cfg: PipelineConfig) -> dict:
    if stage not in RUNNERS:
        raise ValueError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    cfg.check()
    t0 = time.perf_counter()
    manifest = RUNNERS[stage](cfg)
    log.info("stage=%s seconds=%.2f", stage, time.perf_counter() - t0)
    return manifest


def run_all(cfg: PipelineConfig, stages=STAGES):
    """Run every stage in order; returns [(stage, seconds, manifest)]."""
    cfg.check()
    report = []
    for stage in stages:
        t0 = time.perf_counter()
        manifest = RUNNERS[stage](cfg)
        elapsed = time.perf_counter() - t0
        log.info("stage=%s seconds=%.2f", stage, elapsed)
        report.append((stage, elapsed, manifest))
    return report


def format_summary(report) -> str:
    lines = []
    for stage, elapsed, manifest in report:
        meta = manifest["meta"]
        if stage == "generate":
            info = f"{meta['n_nodes']} nodes, {meta['n_meetings']} meetings"
        elif stage == "graphs":
            edges = meta["edges_per_window"]
            info = f"{meta['n_windows']} windows, {sum(edges)} edges (mean {np.mean(edges):.1f}/window)"
        elif stage == "walks":
            info = f"{sum(meta['walks_per_window'])} walks, {len(meta['empty_windows'])} empty windows"
        elif stage == "embed":
            info = f"loss {meta['final_loss']:.6g} after {meta['sweeps']} sweeps"
        else:
            info = (f"top-5 avg norm {meta['top5_avg_norm']}, "
                    f"top-5 avg cosine distance {meta['top5_avg_cosdist']}")
        lines.append(f"{stage:<9} {elapsed:8.2f}s  {info}")
    return "\n".join(lines)
