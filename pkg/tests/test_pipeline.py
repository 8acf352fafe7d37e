import hashlib
import json
import os

import numpy as np
import pytest
import yaml

from mobembed import io
from mobembed.cli import main
from mobembed.config import PipelineConfig, config_from_dict, load_config
from mobembed.contact import ContactGraph, GraphSequence
from mobembed.grm import PositionTrace
from mobembed.pipeline import MissingArtifactError, run_all, run_stage

TINY = {
    "seed": 5,
    "trace": {"n_nodes": 12, "n_groups": 20, "sim_duration": 3 * 86400},
    "embed": {"d": 4, "max_sweeps": 20},
}


def write_config(tmp_path, overrides=None, name="cfg.yaml"):
    data = json.loads(json.dumps(TINY))
    for section, values in (overrides or {}).items():
        if isinstance(values, dict):
            data.setdefault(section, {}).update(values)
        else:
            data[section] = values
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def tree_hashes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            p = os.path.join(dirpath, f)
            out[os.path.relpath(p, root)] = hashlib.sha256(open(p, "rb").read()).hexdigest()
    return out


def test_validate_default_is_clean(capsys):
    assert main(["validate"]) == 0
    assert capsys.readouterr().out == ""


def test_validate_reports_every_problem(tmp_path, capsys):
    cfg = write_config(tmp_path, {"trace": {"k_mix": [[86400, 0.6], [604800, 0.3]]},
                                  "walks": {"p": 0}})
    assert main(["validate", "--config", cfg]) == 1
    out = capsys.readouterr().out
    assert "trace.k_mix" in out and "0.9" in out
    assert "p must be > 0" in out


def test_unknown_key_is_reported(tmp_path):
    cfg = write_config(tmp_path, {"walks": {"bogus": 1}})
    _, problems = load_config(cfg, None, None, None)
    assert any("bogus" in p for p in problems)


def test_seed_override_propagates():
    cfg, problems = config_from_dict({"seed": 9})
    assert not problems
    assert cfg.trace.seed == 9 and cfg.walks.seed == 9


def test_defaults_round_trip(tmp_path, capsys):
    assert main(["defaults"]) == 0
    text = capsys.readouterr().out
    path = tmp_path / "defaults.yaml"
    path.write_text(text)
    cfg, problems = load_config(str(path), None, None, None)
    assert not problems
    assert cfg.to_dict() == PipelineConfig().to_dict()
    assert cfg.trace.n_nodes == 100 and cfg.trace.sim_duration == 87 * 86400
    assert (cfg.walks.nw, cfg.walks.wl, cfg.walks.p, cfg.walks.q) == (4, 8, 1.0, 0.5)
    assert (cfg.embed.d, cfg.embed.lam, cfg.embed.tau) == (50, 50.0, 15.0)


def test_stage_without_upstream_names_the_stage(tmp_path, caplog):
    cfg = write_config(tmp_path)
    assert main(["walks", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "mobembed graphs" in caplog.text


def test_empty_trace_file_fails_validation(tmp_path, caplog):
    out = tmp_path / "o"
    (out / "trace").mkdir(parents=True)
    (out / "trace" / "trace.csv").write_text(",".join(io.TRACE_HEADER) + "\n")
    assert main(["graphs", "--config", write_config(tmp_path), "--out", str(out)]) == 1
    assert "no segments" in caplog.text


def test_broken_trace_reports_row(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("node_id,t_start_s,t_end_s,x_m,y_m\n0,0,10,1,1\n0,12,20,1,1\n")
    with pytest.raises(io.ValidationError, match=":3:"):
        io.read_trace(path)


def test_external_trace_runs_through_graphs(tmp_path):
    out = tmp_path / "o"
    (out / "trace").mkdir(parents=True)
    trace = PositionTrace([np.array([[0, 86400, 10, 10]], float),
                           np.array([[0, 86400, 60, 10]], float)], 86400.0)
    io.write_trace(out / "trace" / "trace.csv", trace)
    cfg, _ = load_config(write_config(tmp_path), None, str(out), None)
    run_stage("graphs", cfg)
    assert (out / "graphs" / "edges.csv").read_text() == "window,u,v\n1,0,1\n"


def test_tiny_pipeline_end_to_end(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "o"
    assert main(["all", "--config", cfg, "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    for stage in ("generate", "graphs", "walks", "embed", "analyze"):
        assert stage in summary
        manifest = json.loads((out / {"generate": "trace"}.get(stage, stage) / "manifest.json").read_text())
        assert manifest["seed"] == 5 and manifest["outputs"]
    assert "top-5 avg norm" in summary
    assert len(list((out / "embed").glob("emb_*.csv"))) == 3
    header, rows = io.read_csv_table(out / "analyze" / "node_stats.csv")
    assert header == io.NODE_STATS_HEADER and len(rows) == 12
    header, rows = io.read_csv_table(out / "analyze" / "correlations.csv")
    assert len(rows) == 14

    # rerunning a stage gives identical hashes
    before = tree_hashes(out / "walks")
    assert main(["walks", "--config", cfg, "--out", str(out)]) == 0
    assert tree_hashes(out / "walks") == before

    # dropping downstream artifacts does not change upstream reruns
    graphs = tree_hashes(out / "graphs")
    for p in (out / "analyze").iterdir():
        p.unlink()
    assert main(["graphs", "--config", cfg, "--out", str(out)]) == 0
    assert tree_hashes(out / "graphs") == graphs


def test_seed_flag_is_deterministic(tmp_path):
    cfg = write_config(tmp_path)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out, seed in ((a, "7"), (b, "7"), (c, "8")):
        assert main(["all", "--config", cfg, "--out", str(out), "--seed", seed]) == 0
    stats = "analyze/node_stats.csv"
    assert (a / stats).read_bytes() == (b / stats).read_bytes()
    assert tree_hashes(a) == tree_hashes(b)
    assert tree_hashes(a) != tree_hashes(c)


def test_thread_count_does_not_change_outputs(tmp_path):
    cfg = write_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["all", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
    assert main(["all", "--config", cfg, "--out", str(b), "--threads", "3"]) == 0
    assert tree_hashes(a) == tree_hashes(b)


def test_dump_ppmi_and_min_contact_flags(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "o"
    assert main(["all", "--config", cfg, "--out", str(out), "--dump-ppmi", "--min-contact-s", "600"]) == 0
    header, _ = io.read_csv_table(out / "embed" / "ppmi.csv")
    assert header == io.PPMI_HEADER


def test_embedding_wider_than_node_count_is_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, {"embed": {"d": 40}})
    assert main(["validate", "--config", cfg]) == 1
    assert "embed.d" in capsys.readouterr().out


def test_missing_manifest_error_type(tmp_path):
    cfg, _ = load_config(write_config(tmp_path), None, str(tmp_path / "o"), None)
    with pytest.raises(MissingArtifactError):
        run_all(cfg, stages=("analyze",))


def test_edges_and_embedding_round_trip(tmp_path):
    a = np.zeros((3, 3), dtype=bool)
    a[0, 2] = a[2, 0] = True
    seq = GraphSequence([ContactGraph(1, a), ContactGraph(2, np.zeros((3, 3), bool))], 86400.0)
    io.write_edges(tmp_path / "e.csv", seq)
    back = io.read_edges(tmp_path / "e.csv", 3, 2)
    assert [g.adjacency.tolist() for g in back] == [g.adjacency.tolist() for g in seq]
    U = np.random.default_rng(0).standard_normal((4, 3))
    io.write_embedding(tmp_path / "u.csv", U)
    assert np.allclose(io.read_embedding(tmp_path / "u.csv"), U, rtol=1e-8)
