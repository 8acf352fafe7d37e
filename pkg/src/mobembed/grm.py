"""Synthetic group-meeting mobility traces.

A simplified group-regularity model: every node lives in a fixed home cell
of a square grid and teleports to a group's venue cell for the duration of
each meeting it attends. Groups meet periodically, with inter-meeting gaps
drawn from a power law with exponential cutoff and snapped to a multiple of
the group's regularity period K.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HOUR = 3600
DAY = 24 * HOUR


class ParameterError(ValueError):
    pass


@dataclass
class SocialParams:
    mean_cluster_size: float = 10.0
    # cluster sizes ~ Normal(mean, mean / size_shape)
    size_shape: float = 1.0
    p_in: float = 0.25
    p_out: float = 0.01


@dataclass
class TraceConfig:
    n_nodes: int = 100
    n_groups: int = 500
    sim_duration: int = 87 * DAY
    k_mix: tuple = ((DAY, 0.70), (7 * DAY, 0.15), (6 * HOUR, 0.15))
    grid_rows: int = 30
    grid_cols: int = 30
    cell_side: float = 50.0
    alpha_gmt: float = 3.0
    beta_gmt: float = 30 * DAY
    # None: gaps start at one regularity period K (K acts as a multiplier)
    x_min_gmt: float | None = None
    alpha_dur: float = 3.0
    beta_dur: float = 30 * DAY
    x_min_dur: float = 900.0
    alpha_size: float = 2.24
    beta_size: int = 30
    social: SocialParams = field(default_factory=SocialParams)
    p_base: float = 0.5
    p_social: float = 0.4
    seed: int = 0

    def problems(self) -> list[str]:
        """Return every violated invariant as a ``field: message`` string."""
        out = []
        for name in ("n_nodes", "n_groups", "sim_duration", "grid_rows", "grid_cols"):
            if getattr(self, name) <= 0:
                out.append(f"trace.{name}: must be > 0")
        if self.cell_side <= 0:
            out.append("trace.cell_side: must be > 0")
        if not self.k_mix:
            out.append("trace.k_mix: must not be empty")
        else:
            total = sum(frac for _, frac in self.k_mix)
            if abs(total - 1.0) > 1e-9:
                out.append(f"trace.k_mix: fractions sum to {total:g}, expected 1")
            for period, frac in self.k_mix:
                if period <= 0:
                    out.append(f"trace.k_mix: period {period} must be > 0")
                if not 0 <= frac <= 1:
                    out.append(f"trace.k_mix: fraction {frac} outside [0, 1]")
        for name in ("alpha_gmt", "alpha_dur", "alpha_size"):
            if getattr(self, name) <= 1:
                out.append(f"trace.{name}: must be > 1")
        for name in ("beta_gmt", "beta_dur", "x_min_gmt", "x_min_dur"):
            if getattr(self, name) is not None and getattr(self, name) <= 0:
                out.append(f"trace.{name}: must be > 0")
        if self.beta_size < 2:
            out.append("trace.beta_size: must be >= 2")
        for name in ("p_base", "p_social"):
            if not 0 <= getattr(self, name) <= 1:
                out.append(f"trace.{name}: must be in [0, 1]")
        s = self.social
        if s.mean_cluster_size <= 0:
            out.append("trace.social.mean_cluster_size: must be > 0")
        if s.size_shape <= 0:
            out.append("trace.social.size_shape: must be > 0")
        for name in ("p_in", "p_out"):
            if not 0 <= getattr(s, name) <= 1:
                out.append(f"trace.social.{name}: must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            out.append("trace.seed: must be a 64-bit unsigned integer")
        return out

    def check(self):
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))


@dataclass
class SocialGraph:
    adjacency: np.ndarray
    clusters: list

    def neighbors(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[node])


@dataclass
class MeetingEvent:
    group_id: int
    venue: tuple
    t_start: int
    t_end: int
    attendees: tuple = ()
    period: int | None = None


@dataclass
class PositionTrace:
    """Piecewise-constant positions.

    ``segments[v]`` is a float array of shape (m, 4) holding rows
    ``(t_start, t_end, x, y)`` that tile ``[0, sim_duration]``.
    """

    segments: list
    sim_duration: float

    @property
    def n_nodes(self) -> int:
        return len(self.segments)

    def problems(self, bounds: tuple | None = None) -> list[str]:
        out = []
        for v, seg in enumerate(self.segments):
            if len(seg) == 0:
                out.append(f"node {v}: no segments")
                continue
            if seg[0, 0] != 0:
                out.append(f"node {v}: first segment starts at {seg[0, 0]}, not 0")
            if seg[-1, 1] != self.sim_duration:
                out.append(f"node {v}: last segment ends at {seg[-1, 1]}, not {self.sim_duration}")
            if np.any(seg[:, 0] >= seg[:, 1]):
                out.append(f"node {v}: empty or reversed segment")
            if np.any(seg[1:, 0] != seg[:-1, 1]):
                out.append(f"node {v}: segments not contiguous")
            if bounds is not None:
                w, h = bounds
                if np.any((seg[:, 2] < 0) | (seg[:, 2] > w) | (seg[:, 3] < 0) | (seg[:, 3] > h)):
                    out.append(f"node {v}: position outside area")
        return out

    def position_at(self, node: int, t: float) -> tuple:
        seg = self.segments[node]
        i = np.searchsorted(seg[:, 0], t, side="right") - 1
        return float(seg[i, 2]), float(seg[i, 3])


def sample_trunc_powerlaw(alpha, beta, x_min, rng, size=None):
    """Draw from p(x) ∝ x**-alpha * exp(-x / beta) on [x_min, inf).

    Pareto proposals are accepted with probability ``exp(-(x - x_min) / beta)``.
    Returns a float if ``size`` is None, otherwise an array of that length.
    """
    if not alpha > 1:
        raise ParameterError(f"alpha must be > 1, got {alpha}")
    if not beta > 0:
        raise ParameterError(f"beta must be > 0, got {beta}")
    if not x_min > 0:
        raise ParameterError(f"x_min must be > 0, got {x_min}")
    expo = -1.0 / (alpha - 1.0)
    if size is None:
        while True:
            x = x_min * (1.0 - rng.random()) ** expo
            if rng.random() < np.exp(-(x - x_min) / beta):
                return float(x)
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = size - filled
        x = x_min * (1.0 - rng.random(m)) ** expo
        keep = x[rng.random(m) < np.exp(-(x - x_min) / beta)]
        out[filled:filled + len(keep)] = keep
        filled += len(keep)
    return out


def group_size_pmf(alpha_size, beta_size):
    sizes = np.arange(2, int(beta_size) + 1)
    w = sizes.astype(float) ** -alpha_size
    return sizes, w / w.sum()


def sample_group_size(alpha_size, beta_size, rng, size=None):
    """Group size on {2, ..., beta_size} with P(s) ∝ s**-alpha_size."""
    if beta_size < 2:
        raise ParameterError(f"beta_size must be >= 2, got {beta_size}")
    if not alpha_size > 1:
        raise ParameterError(f"alpha_size must be > 1, got {alpha_size}")
    sizes, pmf = group_size_pmf(alpha_size, beta_size)
    draw = rng.choice(sizes, p=pmf, size=size)
    return int(draw) if size is None else draw


def build_social_graph(config: TraceConfig, rng) -> SocialGraph:
    """Gaussian random partition graph over ``config.n_nodes`` nodes."""
    n = config.n_nodes
    if n < 2:
        raise ParameterError("social graph needs at least 2 nodes")
    sp = config.social
    sd = np.sqrt(sp.mean_cluster_size / sp.size_shape)
    clusters = []
    start = 0
    while start < n:
        size = max(1, int(round(rng.normal(sp.mean_cluster_size, sd))))
        size = min(size, n - start)
        clusters.append(list(range(start, start + size)))
        start += size
    label = np.empty(n, dtype=int)
    for c, members in enumerate(clusters):
        label[members] = c
    same = label[:, None] == label[None, :]
    prob = np.where(same, sp.p_in, sp.p_out)
    upper = np.triu(rng.random((n, n)) < prob, k=1)
    return SocialGraph(adjacency=upper | upper.T, clusters=clusters)


def _pick_period(config, rng):
    periods = [int(k) for k, _ in config.k_mix]
    weights = np.array([f for _, f in config.k_mix], dtype=float)
    return periods[rng.choice(len(periods), p=weights / weights.sum())]


def snap_gap(gap: float, period: int) -> int:
    return max(1, int(round(gap / period))) * period


def schedule_meetings(config: TraceConfig, rng) -> list[MeetingEvent]:
    """Meeting times and venues for every group; attendees are left empty.

    Each group draws a regularity period from ``k_mix``, a venue cell and a
    phase in ``[0, K)``. Start-to-start gaps are snapped to multiples of K;
    durations are capped by the next gap and by the end of the simulation.
    The first meeting happens at ``phase + first gap``.
    """
    T = int(config.sim_duration)
    events = []
    for g in range(config.n_groups):
        period = _pick_period(config, rng)
        venue = (int(rng.integers(config.grid_rows)), int(rng.integers(config.grid_cols)))
        phase = int(rng.integers(period))
        x_min = period if config.x_min_gmt is None else config.x_min_gmt

        def draw_gap():
            return snap_gap(sample_trunc_powerlaw(config.alpha_gmt, config.beta_gmt, x_min, rng), period)

        t = phase + draw_gap()
        while t < T:
            gap = draw_gap()
            dur = sample_trunc_powerlaw(config.alpha_dur, config.beta_dur, config.x_min_dur, rng)
            dur = int(min(max(1, round(dur)), gap, T - t))
            events.append(MeetingEvent(g, venue, t, t + dur, (), period))
            t += gap
    return events


def attendance_probability(member, roster, social_graph, p_base=0.5, p_social=0.4):
    friends = social_graph.neighbors(member)
    if len(friends) == 0:
        return min(1.0, max(0.0, p_base))
    frac = np.isin(friends, roster).sum() / len(friends)
    return min(1.0, max(0.0, p_base + p_social * frac))


def assign_attendees(event, group_members, social_graph, rng, p_base=0.5, p_social=0.4,
                     max_tries=16, probs=None):
    """Return a copy of ``event`` with attendees drawn from the group roster.

    Members attend independently; an empty draw is retried up to
    ``max_tries`` times before the whole roster is taken. ``probs`` may carry
    precomputed per-member probabilities aligned with the sorted roster.
    """
    roster = np.asarray(sorted(group_members))
    if probs is None:
        probs = np.array([attendance_probability(m, roster, social_graph, p_base, p_social) for m in roster])
    for _ in range(max_tries):
        mask = rng.random(len(roster)) < probs
        if mask.any():
            attendees = tuple(int(m) for m in roster[mask])
            break
    else:
        attendees = tuple(int(m) for m in roster)
    return MeetingEvent(event.group_id, event.venue, event.t_start, event.t_end, attendees, event.period)


def cell_center(row, col, side):
    return (col + 0.5) * side, (row + 0.5) * side


def generate_trace(config: TraceConfig):
    """Generate a PositionTrace and the attended meetings for ``config``.

    Returns ``(trace, meetings, social_graph)``.
    """
    config.check()
    rng = np.random.default_rng(config.seed)
    n = config.n_nodes
    side = config.cell_side
    social = build_social_graph(config, rng)
    homes = np.column_stack([rng.integers(config.grid_rows, size=n), rng.integers(config.grid_cols, size=n)])
    rosters = []
    for _ in range(config.n_groups):
        size = min(sample_group_size(config.alpha_size, config.beta_size, rng), n)
        rosters.append(np.sort(rng.choice(n, size=size, replace=False)))

    # probabilities are fixed per (group, member); cache them per group
    probs = [
        np.array([attendance_probability(m, r, social, config.p_base, config.p_social) for m in r])
        for r in rosters
    ]
    meetings = []
    visits = [[] for _ in range(n)]
    for ev in schedule_meetings(config, rng):
        ev = assign_attendees(ev, rosters[ev.group_id], social, rng, probs=probs[ev.group_id])
        attendees = ev.attendees
        meetings.append(ev)
        cx, cy = cell_center(ev.venue[0], ev.venue[1], side)
        jitter = np.round(rng.uniform(-side / 2, side / 2, size=(len(attendees), 2)), 3)
        for m, (jx, jy) in zip(attendees, jitter):
            visits[m].append((ev.t_start, ev.t_end, cx + jx, cy + jy))

    T = float(config.sim_duration)
    segments = []
    for v in range(n):
        hx, hy = cell_center(homes[v, 0], homes[v, 1], side)
        rows = []
        cursor = 0.0
        # earliest start wins; a later overlapping meeting keeps only its tail
        for ts, te, x, y in sorted(visits[v], key=lambda r: (r[0], r[1])):
            s = max(ts, cursor)
            if s >= te:
                continue
            if s > cursor:
                rows.append((cursor, s, hx, hy))
            rows.append((s, te, x, y))
            cursor = te
        if cursor < T:
            rows.append((cursor, T, hx, hy))
        segments.append(np.array(rows, dtype=float))
    return PositionTrace(segments, T), meetings, social
