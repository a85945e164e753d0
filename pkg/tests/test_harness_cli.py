"""Experiment harness and command-line interface."""
from __future__ import annotations

import json

import numpy as np
import pytest

from wrtlab.cli import main
from wrtlab.harness import ConfigError, build_id, load_config, replicate_rng, run_experiment


def _config(tmp_path, **over):
    cfg = {
        "model": {"tree": "pat", "seq": {"kind": "constant_fitness", "a": 1, "b": 1}},
        "n": [1000, 4000],
        "replicates": 6,
        "seed": 99,
        "out": str(tmp_path / "run.csv"),
        "statistics": ["root_degree", "scaled_root_degree", "height"],
        "params": {"gamma": 0.5},
    }
    cfg.update(over)
    return cfg


# -- harness ----------------------------------------------------------------


def test_replicate_streams_are_independent_of_order():
    a = [replicate_rng(5, i).random() for i in range(4)]
    b = [replicate_rng(5, i).random() for i in reversed(range(4))][::-1]
    assert a == b
    assert len(set(a)) == 4


def test_run_is_deterministic(tmp_path):
    run_experiment(_config(tmp_path))
    first = (tmp_path / "run.csv").read_bytes()
    run_experiment(_config(tmp_path))
    assert (tmp_path / "run.csv").read_bytes() == first


def test_threads_do_not_change_output(tmp_path):
    run_experiment(_config(tmp_path))
    serial = (tmp_path / "run.csv").read_bytes()
    run_experiment(_config(tmp_path, threads=3))
    assert (tmp_path / "run.csv").read_bytes() == serial


def test_summary_contents(tmp_path):
    res = run_experiment(_config(tmp_path, tolerances={"scaled_root_degree": [1.7725, 10.0]}))
    summary = json.loads((tmp_path / "run.json").read_text())
    assert summary["build"] == build_id()
    assert set(summary["statistics"]) == {"root_degree", "scaled_root_degree", "height"}
    assert summary["statistics"]["scaled_root_degree"]["4000"]["mean"] > 0
    assert summary["checks"]["scaled_root_degree"]["pass"] is True
    assert len(res.rows) == 12
    header = (tmp_path / "run.csv").read_text().splitlines()[0]
    assert header == "replicate,n,root_degree,scaled_root_degree,height"


def test_degree_scaling_mean(tmp_path):
    res = run_experiment(_config(tmp_path, n=[10**5], replicates=400,
                                 statistics=["scaled_root_degree"]))
    mean = res.summary["statistics"]["scaled_root_degree"]["100000"]
    assert abs(mean["mean"] - np.sqrt(np.pi)) < 4 * mean["se"] + 0.01


def test_zero_replicates(tmp_path):
    run_experiment(_config(tmp_path, replicates=0))
    assert (tmp_path / "run.csv").read_text().splitlines() == [
        "replicate,n,root_degree,scaled_root_degree,height"]


@pytest.mark.parametrize("bad", [
    {"model": {"tree": "graph", "seq": {}}},
    {"model": {"tree": "wrt"}},
    {"n": []},
    {"n": [1]},
    {"replicates": -1},
    {"statistics": ["nope"]},
    {"tolerances": {"M_n": [1, 0.1]}},
])
def test_config_errors(tmp_path, bad):
    with pytest.raises(ConfigError):
        load_config(_config(tmp_path, **bad))


def test_model_sequence_mismatch(tmp_path):
    cfg = _config(tmp_path, model={"tree": "wrt", "seq": {"kind": "constant_fitness", "a": 1, "b": 1}})
    with pytest.raises(ConfigError):
        run_experiment(cfg)


def test_unknown_config_key(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_config(tmp_path, colour="red"))


def test_config_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(_config(tmp_path)))
    assert load_config(str(path)).seed == 99
    with pytest.raises(ConfigError):
        load_config("{not json")


# -- CLI --------------------------------------------------------------------


def test_cli_grow(capsys):
    assert main(["grow", "--n", "5", "--seed", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "i,parent"
    assert out[1] == "1,"
    assert len(out) == 6


def test_cli_grow_deterministic(capsys, tmp_path):
    for name in ("a.csv", "b.csv"):
        assert main(["--seed", "3", "grow", "--model", "pat", "--n", "200",
                     "--seq", '{"kind": "constant_fitness", "a": 1, "b": 1}',
                     "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_cli_stats_profile(capsys):
    assert main(["stats", "--stat", "profile", "--n", "100"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "k,count,prediction"
    assert sum(int(r.split(",")[1]) for r in lines[1:]) == 100


def test_cli_urn(capsys):
    assert main(["urn", "--kind", "immigration", "--n", "50", "--replicates", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "replicate,n,red,total"


def test_cli_limits(capsys):
    assert main(["limits", "--law", "beta", "--params", '{"a": 2, "b": 3}', "--samples", "1000"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["exact"]["2"] == pytest.approx(0.2)


def test_cli_verify(capsys):
    assert main(["verify", "theorem1", "--n", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["pass"] is True
    assert main(["verify", "pagraph", "--n", "3", "--m", "2", "--alpha", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["pass"] is True


def test_cli_pagraph(capsys, tmp_path):
    assert main(["pagraph", "--n", "10", "--replicates", "2", "--out", str(tmp_path / "g.csv")]) == 0
    assert (tmp_path / "g_r0.csv").read_text().startswith("u,v")
    assert (tmp_path / "g_r1.csv").exists()


def test_cli_accept_subset(capsys):
    assert main(["accept", "--criteria", "1", "11"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True
    assert "build" in report


def test_cli_run(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(_config(tmp_path)))
    assert main(["run", str(path)]) == 0


def test_cli_errors(capsys):
    assert main(["grow", "--n", "5", "--seq", '{"kind": "power", "gamma": -1, "C": 1}']) == 2
    assert main(["verify", "theorem1", "--n", "9"]) == 2
    # malformed arguments are rejected by the parser with exit status 2
    with pytest.raises(SystemExit) as exc:
        main(["urn", "--kind", "timedep", "--n", "10", "--params", "{bad"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["nonsense"])
