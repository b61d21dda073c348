import csv
import json

import pytest

from antnet import harness
from antnet.harness import ConfigError, ExperimentConfig, MissingArtifacts
from antnet.triangle import line_triangle


def _cfg(tmp_path, **kw):
    data = {"triangle": {"lengths": [1, 1, 2]}, "alpha": 0.5, "n_steps": 5000, "seeds": [1],
            "output_dir": str(tmp_path / "out")}
    data.update(kw)
    return ExperimentConfig.from_dict(data)


def test_run_produces_files(tmp_path):
    cfg = _cfg(tmp_path)
    out = harness.run_experiment(cfg)
    snaps = harness.load_snapshots(cfg, 1)
    assert snaps[-1]["n"] == 5000
    assert snaps[-1]["N"][0] + snaps[-1]["N"][1] == 5000
    rows = list(csv.DictReader(open(out / "summary.csv", encoding="utf-8")))
    assert rows[0]["seed"] == "1" and rows[0]["n"] == "5000"


def test_rerun_is_byte_identical(tmp_path):
    cfg = _cfg(tmp_path, seeds=[3, 4])
    harness.run_experiment(cfg)
    first = harness.seed_path(cfg, 4).read_bytes()
    harness.run_experiment(cfg)
    assert harness.seed_path(cfg, 4).read_bytes() == first


def test_parallel_matches_serial(tmp_path, monkeypatch):
    cfg = _cfg(tmp_path, seeds=[5, 6], n_steps=2000)
    harness.run_experiment(cfg)
    serial = [harness.seed_path(cfg, s).read_bytes() for s in (5, 6)]
    monkeypatch.setenv("ANTNET_THREADS", "2")
    harness.run_experiment(cfg)
    assert [harness.seed_path(cfg, s).read_bytes() for s in (5, 6)] == serial


@pytest.mark.parametrize("change,field", [
    ({"seeds": []}, "seeds"),
    ({"seeds": [1, 1]}, "seeds"),
    ({"alpha": 1.0}, "alpha"),
    ({"n_steps": 0}, "n_steps"),
    ({"triangle": {"lengths": [0, 1, 1]}}, "triangle"),
    ({"triangle": {"g1": "e", "g2": "e", "g3": "par(e"}}, "triangle"),
    ({"checkpoints": "sometimes"}, "checkpoints"),
    ({"colour": "red"}, "colour"),
])
def test_config_errors_name_the_field(tmp_path, change, field):
    with pytest.raises(ConfigError) as info:
        _cfg(tmp_path, **change)
    assert field in [k for k, _ in info.value.problems]


def test_config_json_error_has_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "alpha": 0.3,\n  oops\n}')
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_file(p)
    assert "line 3" in str(info.value)


def test_threads_env_validation(monkeypatch):
    monkeypatch.setenv("ANTNET_THREADS", "many")
    with pytest.raises(ConfigError):
        harness.max_workers(3)
    monkeypatch.setenv("ANTNET_THREADS", "8")
    assert harness.max_workers(3) == 3


def test_verify_requires_artifacts(tmp_path):
    with pytest.raises(MissingArtifacts):
        harness.verify_theorem(_cfg(tmp_path))


def test_predicted_edges_line_and_sp():
    tri = line_triangle(1, 2, 1)
    support, values = harness.predicted_edges(tri, (1.0, 0.0, 0.5))
    assert support == {0, 3}
    assert values == {0: 1.0, 1: 0.0, 2: 0.0, 3: 0.5}
    from antnet.sp_graph import parse_sp
    from antnet.triangle import assemble
    tri = assemble(parse_sp("par(e,series(e,e))"), parse_sp("par(series(e,e),series(e,e))"), parse_sp("e"))
    support, values = harness.predicted_edges(tri, (0.5, 0.5, 0.2))
    assert support == {0, 3, 4, 5, 6, 7}
    assert values[0] == 0.5 and values[1] == values[2] == 0.0
    assert 3 not in values  # two tied geodesics: the split is not predicted


def test_verify_small_case_ii_run(tmp_path):
    cfg = _cfg(tmp_path, triangle={"lengths": [1, 1, 1]}, alpha=0.3, n_steps=40_000, seeds=[0, 1, 2],
               tolerance=0.03)
    harness.run_experiment(cfg)
    rep = harness.verify_theorem(cfg)
    assert rep.case == "II"
    assert rep.passed, rep.lines()
    assert json.loads(rep.to_json())["passed"] is True


def test_flow_overlay(tmp_path):
    cfg = _cfg(tmp_path, triangle={"lengths": [1, 1, 1]}, alpha=0.3, n_steps=20_000)
    harness.run_experiment(cfg)
    rows, summary = harness.report_flow_overlay(cfg)
    assert rows[0]["t"] == 0 and rows[0]["d1"] == 0 and rows[0]["d3"] == 0
    assert summary["flow_limit"] == pytest.approx(summary["theorem_limit"], abs=1e-9)
    assert summary["final_empirical"] == pytest.approx(summary["theorem_limit"], abs=0.05)
    text = harness.rows_to_csv(rows)
    assert text.splitlines()[0] == "n,h,t,emp_w1,emp_w3,flow_w1,flow_w3,d1,d3"


def test_harmonic():
    assert harness.harmonic(1) == 1
    exact = sum(1 / k for k in range(1, 20001))
    assert harness.harmonic(20000) == pytest.approx(exact, abs=1e-12)
