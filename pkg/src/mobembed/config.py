"""Pipeline configuration: dataclasses, YAML loading and validation."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field

import yaml

from .embed import FitOptions
from .grm import SocialParams, TraceConfig
from .walks import WalkParams


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class GraphParams:
    window_duration: float = 86400.0
    contact_radius: float = 100.0
    min_contact_s: float = 0.0


@dataclass
class EmbedParams:
    d: int = 50
    lam: float = 50.0
    tau: float = 15.0
    context_radius: int = 5
    max_sweeps: int = 200
    rtol: float = 1e-6
    step0: float = 1e-2
    inner_steps: int = 5
    dump_ppmi: bool = False

    def fit_options(self) -> FitOptions:
        return FitOptions(self.max_sweeps, self.rtol, self.step0, self.inner_steps)


@dataclass
class AnalyzeParams:
    # "forward": all window pairs i < j; "consecutive": (t, t+1) only
    cosine_mode: str = "forward"
    cv_threshold: float = 30.0


@dataclass
class PipelineConfig:
    seed: int = 0
    out_dir: str = "out"
    threads: int = 1
    trace: TraceConfig = field(default_factory=TraceConfig)
    graphs: GraphParams = field(default_factory=GraphParams)
    walks: WalkParams = field(default_factory=WalkParams)
    embed: EmbedParams = field(default_factory=EmbedParams)
    analyze: AnalyzeParams = field(default_factory=AnalyzeParams)

    def __post_init__(self):
        self.sync_seed()

    def sync_seed(self):
        self.trace.seed = self.seed
        self.walks.seed = self.seed

    def problems(self) -> list[str]:
        out = []
        if not 0 <= self.seed < 2**64:
            out.append("seed: must be a 64-bit unsigned integer")
        if self.threads < 1:
            out.append("threads: must be >= 1")
        out += self.trace.problems()
        g = self.graphs
        if not g.window_duration > 0:
            out.append("graphs.window_duration: must be > 0")
        if not g.contact_radius > 0:
            out.append("graphs.contact_radius: must be > 0")
        if g.min_contact_s < 0:
            out.append("graphs.min_contact_s: must be >= 0")
        out += self.walks.problems()
        e = self.embed
        if not 1 <= e.d <= self.trace.n_nodes:
            out.append(f"embed.d: must be in [1, n_nodes={self.trace.n_nodes}]")
        if e.lam < 0:
            out.append("embed.lam: must be >= 0")
        if e.tau < 0:
            out.append("embed.tau: must be >= 0")
        if e.context_radius < 1:
            out.append("embed.context_radius: must be >= 1")
        if e.max_sweeps < 1 or e.inner_steps < 1:
            out.append("embed.max_sweeps/inner_steps: must be >= 1")
        if not e.rtol > 0 or not e.step0 > 0:
            out.append("embed.rtol/step0: must be > 0")
        if self.analyze.cosine_mode not in ("forward", "consecutive"):
            out.append("analyze.cosine_mode: must be 'forward' or 'consecutive'")
        out += _writable(self.out_dir)
        return out

    def check(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["trace"]["k_mix"] = [list(x) for x in self.trace.k_mix]
        return d

    def section_hash(self, *sections) -> str:
        d = self.to_dict()
        blob = {s: d[s] for s in sections}
        blob["seed"] = self.seed
        return hashlib.sha256(json.dumps(blob, sort_keys=True).encode()).hexdigest()


def _writable(path):
    probe = os.path.abspath(path)
    while not os.path.exists(probe):
        parent = os.path.dirname(probe)
        if parent == probe:
            break
        probe = parent
    if not os.path.isdir(probe) or not os.access(probe, os.W_OK):
        return [f"out_dir: {path} is not writable"]
    return []


def _build(cls, data, prefix, problems):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        problems.append(f"{prefix}: expected a mapping")
        return cls()
    names = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in names:
            problems.append(f"{prefix}.{key}: unknown field")
            continue
        default = getattr(cls(), key)
        if dataclasses.is_dataclass(default):
            kwargs[key] = _build(type(default), value, f"{prefix}.{key}", problems)
        elif key == "k_mix":
            try:
                kwargs[key] = tuple((int(p), float(f)) for p, f in value)
            except (TypeError, ValueError):
                problems.append(f"{prefix}.k_mix: expected a list of [period_s, fraction] pairs")
        else:
            kwargs[key] = _coerce(value, default, f"{prefix}.{key}", problems)
    return cls(**kwargs)


def _coerce(value, default, name, problems):
    if value is None:
        return value
    try:
        if default is None:
            return float(value)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ValueError
            return value
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if isinstance(default, float):
            return float(value)
        return type(default)(value)
    except (TypeError, ValueError):
        problems.append(f"{name}: cannot interpret {value!r} as {type(default).__name__}")
        return default


def config_from_dict(data: dict | None):
    """Build a PipelineConfig; returns (config, parse problems)."""
    problems = []
    data = dict(data or {})
    top = {}
    defaults = PipelineConfig()
    for key in ("seed", "out_dir", "threads"):
        if key in data:
            top[key] = _coerce(data.pop(key), getattr(defaults, key), key, problems)
    sections = {
        "trace": TraceConfig, "graphs": GraphParams, "walks": WalkParams,
        "embed": EmbedParams, "analyze": AnalyzeParams,
    }
    for key, value in data.items():
        if key in sections:
            top[key] = _build(sections[key], value, key, problems)
        else:
            problems.append(f"{key}: unknown section")
    return PipelineConfig(**top), problems


def load_config(path=None, seed=None, out_dir=None, threads=None):
    """Read a YAML config (or defaults when ``path`` is None) and apply overrides."""
    data = {}
    problems = []
    if path is not None:
        try:
            with open(path) as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError([f"config: cannot read {path}: {exc.strerror}"]) from None
        except yaml.YAMLError as exc:
            raise ConfigError([f"config: invalid YAML in {path}: {exc}"]) from None
        if not isinstance(data, dict):
            raise ConfigError([f"config: {path} must hold a mapping"])
    cfg, problems = config_from_dict(data)
    if seed is not None:
        cfg.seed = seed
    if out_dir is not None:
        cfg.out_dir = out_dir
    if threads is not None:
        cfg.threads = threads
    cfg.sync_seed()
    return cfg, problems


def dump_config(cfg: PipelineConfig) -> str:
    d = cfg.to_dict()
    for key in ("seed",):
        d["trace"].pop(key, None)
        d["walks"].pop(key, None)
    return yaml.safe_dump(d, sort_keys=False)


__all__ = [
    "AnalyzeParams", "ConfigError", "EmbedParams", "GraphParams", "PipelineConfig",
    "SocialParams", "config_from_dict", "dump_config", "load_config",
]
