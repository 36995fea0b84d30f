import json
from pathlib import Path

import pytest
import yaml

from msalab import cli, runner
from msalab.config import ExperimentConfig, from_dict, load, validate
from msalab.ensemble import DisorderModel
from msalab.errors import ValidationError
from msalab.msa import MSAParams


def write_cfg(tmp_path, raw, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(raw))
    return p


def test_validate_admissible_defaults():
    cfg = ExperimentConfig("bootstrap", msa=MSAParams(theta=4, p=1, p_prime=1.5))
    assert validate(cfg) == []


def test_validate_names_violations():
    cfg = ExperimentConfig("bootstrap", msa=MSAParams(p=1.5, p_prime=1.0))
    assert any("0 < p < p′" in d for d in validate(cfg))
    cfg = ExperimentConfig("bootstrap", params={"interval_stage": True}, msa=MSAParams(theta=3.0, p_prime=1.2,
                                                                                       theta_prime=2.9, s=2.1,
                                                                                       alpha=1.1))
    assert any("θ > 2p + (b+1)d" in d for d in validate(cfg))


def test_validate_enumerates_everything():
    cfg = ExperimentConfig("wegner", dim=0, trials=0, workers=0,
                           params={"eta_list": [2.0], "scale_list": [7], "bogus": 1})
    diags = validate(cfg)
    for needle in ("dim", "trials", "workers", "eta", "scale_list", "bogus"):
        assert any(needle in d for d in diags), needle


def test_from_dict_unknown_fields():
    with pytest.raises(ValidationError) as exc:
        from_dict({"experiment": "ne", "colour": 1, "msa": {"kappa": 2}})
    assert len(exc.value.diagnostics) >= 2


def test_yaml_and_manifest_roundtrip(tmp_path):
    raw = {"experiment": "lyapunov", "model": {"coupling": 2.0, "master_seed": 4},
           "params": {"steps": 2000, "energies": [0.0, 1.0]}}
    cfg = load(write_cfg(tmp_path, raw))
    man = runner.run(cfg, tmp_path / "a")
    again = load(tmp_path / "a" / "manifest.json")
    assert again.to_dict()["params"] == cfg.to_dict()["params"]
    man2 = runner.run(again, tmp_path / "b")
    assert man.files == man2.files


@pytest.mark.parametrize("experiment,params,trials", [
    ("wegner", {"scale_list": [12], "eta_list": [0.01, 0.1]}, 100),
    ("ne", {"scale_list": [12, 24]}, 20),
    ("msa", {"scale_list": [12], "two_box": True}, 20),
    ("sli", {"scale_list": [36]}, 5),
    ("edi", {"scale_list": [36]}, 5),
    ("decay", {"L": 60}, 2),
    ("dynamics", {"L": 60, "t_max": 100.0}, 2),
    ("correlator", {"L": 60}, 2),
    ("oracle", {"instances": 5}, 1),
])
def test_determinism_every_experiment(tmp_path, experiment, params, trials):
    cfg = ExperimentConfig(experiment, model=DisorderModel(3.0, master_seed=9), trials=trials, params=params)
    a = runner.run(cfg, tmp_path / "a")
    b = runner.run(cfg, tmp_path / "b")
    assert a.files == b.files
    for name in ("data.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert runner.sha256_file(tmp_path / "a" / name) == a.files[name]
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["status"] == "complete" and man["master_seed"] == 9


def test_workers_do_not_change_results(tmp_path):
    base = dict(model=DisorderModel(1.0), trials=100, params={"scale_list": [12, 24]})
    a = runner.run(ExperimentConfig("ne", workers=1, **base), tmp_path / "a")
    b = runner.run(ExperimentConfig("ne", workers=2, **base), tmp_path / "b")
    assert a.files == b.files


def test_crash_leaves_incomplete_manifest(tmp_path, monkeypatch):
    def boom(cfg, p):
        raise RuntimeError("killed")
    monkeypatch.setitem(runner.DISPATCH, "ne", boom)
    with pytest.raises(RuntimeError):
        runner.run(ExperimentConfig("ne"), tmp_path)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["status"] == "incomplete" and man["files"] == {}
    assert not (tmp_path / "data.csv").exists()


def test_free_bootstrap_all_pass(tmp_path):
    cfg = load(Path(__file__).resolve().parents[1] / "configs" / "bootstrap_free.yaml")
    runner.run(cfg, tmp_path)
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["all_pass"] is True


def test_cli_exit_codes(tmp_path, capsys):
    good = write_cfg(tmp_path, {"experiment": "oracle", "params": {"instances": 4}})
    assert cli.main(["oracle", "--config", str(good), "--out", str(tmp_path / "o")]) == 0
    bad = write_cfg(tmp_path, {"experiment": "bootstrap", "msa": {"p": 2.0, "p_prime": 1.0}}, "bad.yaml")
    assert cli.main(["bootstrap", "--config", str(bad), "--out", str(tmp_path / "b")]) == 1
    assert "0 < p < p′" in capsys.readouterr().err
    cap = write_cfg(tmp_path, {"experiment": "decay", "dim": 2, "trials": 1, "params": {"L": 150}}, "cap.yaml")
    assert cli.main(["decay", "--config", str(cap), "--out", str(tmp_path / "c")]) == 2
    assert "cap" in capsys.readouterr().err
    strict = write_cfg(tmp_path, {"experiment": "oracle", "params": {"instances": 4, "rtol": 0.0}}, "s.yaml")
    # rtol 0 cannot be met by floating point: the suite fails and reports a numerical failure
    assert cli.main(["oracle", "--config", str(strict), "--out", str(tmp_path / "s")]) == 3


def test_cli_seed_override(tmp_path):
    cfg = write_cfg(tmp_path, {"experiment": "lyapunov", "params": {"steps": 500}})
    assert cli.main(["lyapunov", "--config", str(cfg), "--seed", "42", "--out", str(tmp_path / "x")]) == 0
    man = json.loads((tmp_path / "x" / "manifest.json").read_text())
    assert man["master_seed"] == 42 and man["config"]["model"]["master_seed"] == 42


def test_cli_experiment_mismatch(tmp_path):
    cfg = write_cfg(tmp_path, {"experiment": "ne"})
    assert cli.main(["wegner", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 1
