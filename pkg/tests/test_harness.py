import json
import subprocess
import sys

import pytest

from ivo import catalog as cat
from ivo import harness
from ivo import interval as iv
from ivo.cli import main
from ivo.interval import Interval


def _write(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_catalog_list():
    entries = cat.catalog_list()
    keys = [e["key"] for e in entries]
    assert len(entries) >= 7
    for k in ("flat_r2_frac", "spd_logdet", "spd_logdet2", "spd_logdet_riop", "posreals_x_plus_inv",
              "euclid_quad", "spd_det_level"):
        assert k in keys
    assert keys == [e["key"] for e in cat.catalog_list()]
    assert all({"key", "model", "description", "anchor"} <= set(e) for e in entries)


def test_config_validation(tmp_path):
    with pytest.raises(harness.ConfigError):
        harness.load_config(_write(tmp_path, {"lam1": 0}), "solve", env={})
    with pytest.raises(harness.ConfigError):
        harness.load_config(_write(tmp_path, {"bogus": 1}), "laws", env={})
    with pytest.raises(harness.ConfigError):
        harness.load_config(_write(tmp_path, {"tolerances": {"eq_tol": -1}}), "laws", env={})
    with pytest.raises(harness.ConfigError):
        harness.load_config(_write(tmp_path, {"command": "vi"}), "laws", env={})
    with pytest.raises(harness.ConfigError):
        harness.load_config(None, "laws", env={"IVO_SEED": "abc"})


def test_seed_precedence(tmp_path):
    path = _write(tmp_path, {"seed": 1})
    assert harness.load_config(path, "laws", env={}).seed == 1
    assert harness.load_config(path, "laws", env={"IVO_SEED": "5"}).seed == 5
    assert harness.load_config(path, "laws", seed=9, env={"IVO_SEED": "5"}).seed == 9


def test_exit_code_for_bad_config(tmp_path, capsys):
    assert main(["solve", "--config", _write(tmp_path, {"lam1": -1.0})]) == harness.EXIT_CONFIG


def test_exit_code_for_solver_failure(tmp_path, capsys):
    out = tmp_path / "r.json"
    cfg = {"problem": "posreals_neg_log", "x_init": [0.5], "checks": ["apply_posreals_grad"]}
    assert main(["solve", "--config", _write(tmp_path, cfg), "--out", str(out)]) == harness.EXIT_SOLVER
    assert json.loads(out.read_text())["solve"]["status"] in ("MaxItersExceeded", "LineSearchFailure")


def test_solve_command_reports_certificates():
    cfg = harness.RunConfig.from_dict({"command": "solve", "problem": "posreals_x_plus_inv", "x_init": [3.0],
                                       "lam1": 1e-9, "lam2": 1.0, "checks": ["apply_posreals_grad"],
                                       "samples": {"certify": 20, "efficiency": 200}})
    rep, status = harness.run(cfg)
    assert status == harness.EXIT_OK
    solve = rep["solve"]
    assert abs(solve["point"]["coords"][0] - 1.0) <= 1e-4
    kinds = {c["kind"]: c["verdict"] for c in solve["certificates"]}
    assert kinds["SampledEfficiency"] == "pass" and kinds["Necessary41"] == "pass"


def test_laws_fault_injection(monkeypatch, tmp_path):
    def buggy(a, b):
        return Interval(a.lo - b.lo, a.lo - b.lo + abs(a.hi - b.hi))
    monkeypatch.setattr(iv, "gh_diff", buggy)
    out = tmp_path / "r.json"
    cfg = _write(tmp_path, {"samples": {"laws": 500}})
    assert main(["laws", "--config", cfg, "--out", str(out)]) == harness.EXIT_FAIL
    rep = json.loads(out.read_text())
    lemma = [c for c in rep["checks"] if c["anchor"].startswith("Lemma 2.1") and c["verdict"] == "fail"]
    assert lemma and lemma[0]["witnesses"]


def test_replay_law_witness(tmp_path):
    cfg = harness.RunConfig.from_dict({"command": "laws", "seed": 3, "samples": {"laws": 300},
                                       "checks": ["metric_gh_cancel"]})
    rep, status = harness.run(cfg)
    assert status == harness.EXIT_FAIL
    w = rep["checks"][0]["witnesses"][0]
    again, st = harness.run(harness.RunConfig.from_dict({"command": "replay", "replay": w["replay"]}))
    assert st == harness.EXIT_FAIL
    assert again["checks"][0]["witnesses"][0]["residual"] == w["residual"]


def test_replay_check_witness():
    cfg = harness.RunConfig.from_dict({"command": "replay", "seed": 0,
                                       "replay": {"kind": "check", "check": "apply_posreals_grad", "seed": 4}})
    rep, status = harness.run(cfg)
    assert status == harness.EXIT_OK and rep["checks"][0]["name"] == "apply_posreals_grad"
    with pytest.raises(harness.ConfigError):
        harness.run(harness.RunConfig.from_dict({"command": "replay", "replay": {"kind": "nope"}}))


def test_report_shape_and_determinism():
    cfg = {"command": "vi", "seed": 11, "samples": {"trials": 20, "certify": 30},
           "checks": ["stampacchia_posreals_x1", "bridge_thm43_random", "pseudomonotone_sign_flip"]}
    a, sa = harness.run(harness.RunConfig.from_dict(cfg))
    b, sb = harness.run(harness.RunConfig.from_dict(cfg))
    assert a["schema"] == "ivo-report/1"
    assert sa == sb == harness.EXIT_OK
    assert harness.dumps(harness.strip_timing(a)) == harness.dumps(harness.strip_timing(b))
    names = [c["name"] for c in a["checks"]]
    assert sorted(names) == sorted(cfg["checks"]) and len(set(names)) == len(names)
    for c in a["checks"]:
        assert c["anchor"] and "wall_time" in c and "residual" in c


def test_registry_names_unique_and_anchored():
    names = [c.name for c in harness.registry()]
    assert len(names) == len(set(names))
    assert all(c.anchor for c in harness.registry())
    assert {c.group for c in harness.registry()} == set(harness.GROUPS)


def test_cli_catalog_subprocess():
    out = subprocess.run([sys.executable, "-m", "ivo", "catalog"], capture_output=True, text=True, check=True)
    rep = json.loads(out.stdout)
    assert any(e["key"] == "posreals_x_plus_inv" for e in rep["catalog"])
