"""Plain-text artifacts: trace, meetings, edge lists, walks, embeddings, tables."""
from __future__ import annotations

import csv
import math
import os
import re

import numpy as np

from .contact import TOPOLOGY_FIELDS, ContactGraph, GraphSequence
from .grm import PositionTrace

TRACE_HEADER = ["node_id", "t_start_s", "t_end_s", "x_m", "y_m"]
MEETINGS_HEADER = ["group_id", "t_start_s", "t_end_s", "cell_row", "cell_col", "attendees"]
EDGES_HEADER = ["window", "u", "v"]
TOPOLOGY_HEADER = ["window", "node", *TOPOLOGY_FIELDS]
LOSS_HEADER = ["sweep", "loss"]
PPMI_HEADER = ["window", "i", "j", "value"]
NODE_STATS_HEADER = [
    "node", "avg_cosdist", "cv_cosdist", "avg_norm", "cv_norm",
    "high_mobility_flag", "high_norm_cv_flag",
]
CORRELATIONS_HEADER = ["metric_a", "metric_b", "r", "p"]


class ValidationError(ValueError):
    pass


def _writer(path):
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def _fmt(x, spec=".12g"):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), spec)


def _rows(path, header):
    """Yield (line_number, row) after checking the header; raises ValidationError."""
    if not os.path.exists(path):
        raise ValidationError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != header:
            raise ValidationError(f"{path}:1: expected header {','.join(header)}, got {first}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def write_trace(path, trace: PositionTrace):
    fh, w = _writer(path)
    with fh:
        w.writerow(TRACE_HEADER)
        for v, seg in enumerate(trace.segments):
            for ts, te, x, y in seg:
                w.writerow([v, f"{ts:.3f}", f"{te:.3f}", f"{x:.3f}", f"{y:.3f}"])


def read_trace(path) -> PositionTrace:
    """Load and validate a trace CSV.

    Node ids must be 0..n-1, each node's segments sorted, contiguous and
    covering [0, T] with the same T for every node.
    """
    per_node = {}
    lines = {}
    for line, row in _rows(path, TRACE_HEADER):
        try:
            v = int(row[0])
            vals = [float(x) for x in row[1:]]
        except ValueError:
            raise ValidationError(f"{path}:{line}: non-numeric field in {row}") from None
        if v < 0 or not all(math.isfinite(x) for x in vals):
            raise ValidationError(f"{path}:{line}: invalid values {row}")
        if vals[0] >= vals[1]:
            raise ValidationError(f"{path}:{line}: segment start {vals[0]} not before end {vals[1]}")
        per_node.setdefault(v, []).append(vals)
        lines.setdefault(v, []).append(line)
    if not per_node:
        raise ValidationError(f"{path}: trace has no segments")
    n = max(per_node) + 1
    missing = sorted(set(range(n)) - set(per_node))
    if missing:
        raise ValidationError(f"{path}: node ids must be contiguous from 0; missing {missing[:10]}")
    segments = []
    end = None
    for v in range(n):
        seg = np.array(per_node[v])
        ln = lines[v]
        if seg[0, 0] != 0:
            raise ValidationError(f"{path}:{ln[0]}: node {v} does not start at t=0")
        for k in range(1, len(seg)):
            if seg[k, 0] != seg[k - 1, 1]:
                raise ValidationError(f"{path}:{ln[k]}: node {v} segment not contiguous with row {ln[k - 1]}")
        if end is None:
            end = seg[-1, 1]
        elif seg[-1, 1] != end:
            raise ValidationError(f"{path}:{ln[-1]}: node {v} ends at {seg[-1, 1]}, others at {end}")
        segments.append(seg)
    return PositionTrace(segments, float(end))


def write_meetings(path, meetings):
    fh, w = _writer(path)
    with fh:
        w.writerow(MEETINGS_HEADER)
        for ev in meetings:
            w.writerow([ev.group_id, ev.t_start, ev.t_end, ev.venue[0], ev.venue[1],
                        ";".join(str(a) for a in ev.attendees)])


def read_meetings(path):
    out = []
    for line, row in _rows(path, MEETINGS_HEADER):
        try:
            g, ts, te, r, c = (int(x) for x in row[:5])
            attendees = tuple(int(a) for a in row[5].split(";") if a)
        except ValueError:
            raise ValidationError(f"{path}:{line}: malformed meeting row {row}") from None
        out.append((g, ts, te, r, c, attendees))
    return out


def write_edges(path, seq: GraphSequence):
    fh, w = _writer(path)
    with fh:
        w.writerow(EDGES_HEADER)
        for g in seq:
            for u, v in g.edges():
                w.writerow([g.window, u, v])


def read_edges(path, n_nodes, n_windows, window_duration=86400.0) -> GraphSequence:
    adj = np.zeros((n_windows, n_nodes, n_nodes), dtype=bool)
    for line, row in _rows(path, EDGES_HEADER):
        try:
            t, u, v = (int(x) for x in row)
        except ValueError:
            raise ValidationError(f"{path}:{line}: non-integer field in {row}") from None
        if not (1 <= t <= n_windows and 0 <= u < n_nodes and 0 <= v < n_nodes) or u == v:
            raise ValidationError(f"{path}:{line}: edge {row} outside node/window range or a self-loop")
        adj[t - 1, u, v] = adj[t - 1, v, u] = True
    return GraphSequence([ContactGraph(t + 1, adj[t]) for t in range(n_windows)], window_duration)


def write_topology(path, rows):
    """``rows`` is a list (per window) of dicts keyed by TOPOLOGY_FIELDS."""
    fh, w = _writer(path)
    with fh:
        w.writerow(TOPOLOGY_HEADER)
        for t, metrics in enumerate(rows, start=1):
            n = len(metrics["degree"])
            for v in range(n):
                w.writerow([t, v, int(metrics["degree"][v])] +
                           [_fmt(metrics[k][v]) for k in TOPOLOGY_FIELDS[1:]])


def read_topology(path, n_nodes, n_windows) -> dict:
    """Per-metric (n_windows, n_nodes) arrays."""
    out = {k: np.full((n_windows, n_nodes), np.nan) for k in TOPOLOGY_FIELDS}
    for line, row in _rows(path, TOPOLOGY_HEADER):
        try:
            t, v = int(row[0]), int(row[1])
            vals = [float(x) for x in row[2:]]
        except ValueError:
            raise ValidationError(f"{path}:{line}: non-numeric field in {row}") from None
        if not (1 <= t <= n_windows and 0 <= v < n_nodes):
            raise ValidationError(f"{path}:{line}: window/node out of range")
        for k, x in zip(TOPOLOGY_FIELDS, vals):
            out[k][t - 1, v] = x
    for k, arr in out.items():
        if np.isnan(arr).any():
            raise ValidationError(f"{path}: missing {k} values for some (window, node)")
    return out


def walks_filename(window: int) -> str:
    return f"walks_{window}.txt"


def write_walks(path, corpus):
    with open(path, "w") as fh:
        for walk in corpus.walks:
            fh.write(" ".join(str(v) for v in walk) + "\n")


def read_walks(path, n_nodes=None):
    walks = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                walk = [int(x) for x in line.split()]
            except ValueError:
                raise ValidationError(f"{path}:{line_no}: non-integer node id") from None
            if n_nodes is not None and any(not 0 <= v < n_nodes for v in walk):
                raise ValidationError(f"{path}:{line_no}: node id outside 0..{n_nodes - 1}")
            walks.append(walk)
    return walks


def emb_filename(window: int) -> str:
    return f"emb_{window}.csv"


def write_embedding(path, U):
    fh, w = _writer(path)
    with fh:
        w.writerow(["node_id"] + [f"c{k}" for k in range(U.shape[1])])
        for v, row in enumerate(U):
            w.writerow([v] + [_fmt(x, ".9g") for x in row])


def read_embedding(path) -> np.ndarray:
    if not os.path.exists(path):
        raise ValidationError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "node_id" or any(h != f"c{k}" for k, h in enumerate(header[1:])):
            raise ValidationError(f"{path}:1: expected header node_id,c0,...")
        rows = []
        for row in reader:
            try:
                node = int(row[0])
                values = [float(x) for x in row[1:]]
            except ValueError:
                raise ValidationError(f"{path}:{reader.line_num}: non-numeric field") from None
            if node != len(rows) or len(values) != len(header) - 1:
                raise ValidationError(f"{path}:{reader.line_num}: expected node {len(rows)} with {len(header) - 1} values")
            rows.append(values)
    return np.array(rows)


def write_losses(path, losses):
    fh, w = _writer(path)
    with fh:
        w.writerow(LOSS_HEADER)
        for k, val in enumerate(losses):
            w.writerow([k, _fmt(val, ".17g")])


def write_ppmi(path, Y_seq):
    fh, w = _writer(path)
    with fh:
        w.writerow(PPMI_HEADER)
        for t, Y in enumerate(Y_seq, start=1):
            for i, j in zip(*np.nonzero(Y)):
                w.writerow([t, i, j, _fmt(Y[i, j])])


def write_node_stats(path, ns, threshold=30.0):
    fh, w = _writer(path)
    with fh:
        w.writerow(NODE_STATS_HEADER)
        for v in range(len(ns.avg_norm)):
            w.writerow([v, _fmt(ns.avg_cosdist[v]), _fmt(ns.cv_cosdist[v]), _fmt(ns.avg_norm[v]),
                        _fmt(ns.cv_norm[v]), int(ns.cv_cosdist[v] > threshold),
                        int(ns.cv_norm[v] > threshold)])


def write_matrix(path, m, row_label, col_labels):
    fh, w = _writer(path)
    with fh:
        w.writerow([row_label] + list(col_labels))
        for i, row in enumerate(m):
            w.writerow([i] + [_fmt(x) for x in row])


def write_correlations(path, rows):
    fh, w = _writer(path)
    with fh:
        w.writerow(CORRELATIONS_HEADER)
        for r in rows:
            w.writerow([r.metric_a, r.metric_b, _fmt(r.r), _fmt(r.p)])


def read_csv_table(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def window_files(directory, prefix, suffix):
    """Map window index -> path for files named ``<prefix><window><suffix>``."""
    pattern = re.compile(rf"^{re.escape(prefix)}(\d+){re.escape(suffix)}$")
    out = {}
    for name in os.listdir(directory):
        m = pattern.match(name)
        if m:
            out[int(m.group(1))] = os.path.join(directory, name)
    return out
