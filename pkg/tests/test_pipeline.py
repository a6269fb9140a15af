import json

import pytest

from vaxjo.cli import main
from vaxjo.errors import SchemaError, StageFailure
from vaxjo.pipeline import PipelineConfig, run_pipeline

UNIFORM_SCENARIO = {
    "geometry": "square",
    "field": {"kind": "uniform", "resolution": 4},
    "first": {"kind": "vertical", "name": "a"},
    "second": {"kind": "horizontal", "name": "b"},
    "n": 20_000,
}

HYPERBOLIC = {
    "a_values": [1, -1],
    "b_values": [1, -1],
    "p_a": [0.5, 0.5],
    "p_b": [0.9, 0.1],
    "t_b_given_a": [[0.9, 0.1], [0.1, 0.9]],
    "t_a_given_b": [[0.9, 0.1], [0.1, 0.9]],
}


def full_config(out, seed=3):
    return {
        "seed": seed,
        "output_dir": str(out),
        "stages": [
            {"stage": "simulate", "scenario": UNIFORM_SCENARIO},
            {"stage": "estimate"},
            {"stage": "qlra"},
        ],
    }


def test_simulate_estimate_qlra(tmp_path):
    out = tmp_path / "run"
    manifest = run_pipeline(PipelineConfig.from_dict(full_config(out)))
    assert manifest["status"] == "ok"
    psi = json.loads((out / "psi.json").read_text())
    assert psi["kind"] == "complex"
    assert psi["born_residual"] <= 1e-12
    assert (out / "operators.json").exists()
    assert (out / "sequences" / "second_given_first_minus.csv").exists()
    written = json.loads((out / "manifest.json").read_text())
    assert written["seed"] == 3
    assert [s["stage"] for s in written["stages"]] == ["simulate", "estimate", "qlra"]
    assert written["stages"][2]["residuals"]["born"] <= 1e-12


def test_reruns_are_byte_identical(tmp_path):
    for name in ("one", "two"):
        run_pipeline(PipelineConfig.from_dict(full_config(tmp_path / name)))
    one, two = tmp_path / "one", tmp_path / "two"
    files = sorted(p.relative_to(one) for p in one.rglob("*") if p.is_file())
    assert len(files) > 8
    for rel in files:
        a, b = (one / rel).read_text(), (two / rel).read_text()
        if rel.name == "manifest.json":
            a = json.loads(a)
            b = json.loads(b)
            a.pop("timestamp")
            b.pop("timestamp")
        assert a == b, rel


def test_env_seed_overrides_config(tmp_path, monkeypatch):
    monkeypatch.setenv("QLRA_SEED", "11")
    config = PipelineConfig.from_dict(full_config(tmp_path / "run", seed=3))
    assert (config.seed, config.seed_source) == (11, "env")
    run_pipeline(config)
    sim = json.loads((tmp_path / "run" / "simulation.json").read_text())
    assert sim["scenario"]["seed"] == 11


def test_hand_written_hyperbolic_data(tmp_path):
    data = tmp_path / "data.json"
    data.write_text(json.dumps(HYPERBOLIC))
    config = {"output_dir": str(tmp_path / "out"), "stages": [{"stage": "qlra", "input": str(data)}]}
    run_pipeline(PipelineConfig.from_dict(config))
    psi = json.loads((tmp_path / "out" / "psi.json").read_text())
    assert psi["kind"] == "hyperbolic"
    assert psi["signs"] == [1, -1]
    assert not (tmp_path / "out" / "operators.json").exists()


def test_bell_scan_alone(tmp_path):
    config = {"output_dir": str(tmp_path), "stages": [{"stage": "bell", "action": "scan", "grid": 4}]}
    run_pipeline(PipelineConfig.from_dict(config))
    lines = (tmp_path / "bell_scan.csv").read_text().splitlines()
    assert lines[0] == "phi_a,phi_b,phi_c,slack"
    assert len(lines) == 9


def test_bell_verify_and_check(tmp_path):
    triple = tmp_path / "t.json"
    triple.write_text(json.dumps({"marginals": [0.5, 0.5, 0.5], "p_a_plus_given_b_plus": 0.5, "p_c_plus_given_b_minus": 0.5, "p_a_plus_given_c_plus": 0.5}))
    config = {
        "seed": 7,
        "output_dir": str(tmp_path / "out"),
        "stages": [
            {"stage": "bell", "action": "verify", "trials": 500},
            {"stage": "bell", "action": "check", "input": str(triple)},
        ],
    }
    run_pipeline(PipelineConfig.from_dict(config))
    assert json.loads((tmp_path / "out" / "bell_verify.json").read_text())["violations"] == 0
    assert json.loads((tmp_path / "out" / "bell_check.json").read_text())["slack"] == pytest.approx(0.5)


@pytest.mark.parametrize(
    "stages",
    [
        [{"stage": "estimate"}],
        [{"stage": "qlra"}],
        [{"stage": "estimate", "sequences_dir": "x"}, {"stage": "simulate", "scenario": UNIFORM_SCENARIO}],
        [{"stage": "bell"}],
        [{"stage": "dance"}],
        [{"stage": "qlra", "input": "d.json", "extra": 1}],
    ],
)
def test_invalid_configs(tmp_path, stages):
    with pytest.raises(SchemaError):
        PipelineConfig.from_dict({"output_dir": str(tmp_path), "stages": stages})


def test_asymmetric_field_fails_estimate(tmp_path):
    scenario = dict(UNIFORM_SCENARIO, field={"kind": "grid", "weights": [[0.2, 0.2], [0.3, 0.3]]})
    config = full_config(tmp_path)
    config["stages"][0]["scenario"] = scenario
    with pytest.raises(StageFailure) as info:
        run_pipeline(PipelineConfig.from_dict(config))
    assert info.value.stage == "estimate"
    assert info.value.exit_code == 3
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert manifest["error"]["stage"] == "estimate"


def test_cli_pipeline_run(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"output_dir": "out", "stages": [{"stage": "bell", "action": "scan", "grid": 6}]}))
    assert main(["pipeline", "run", "--config", str(cfg)]) == 0
    assert (tmp_path / "out" / "bell_scan.csv").exists()
    data = tmp_path / "d.json"
    data.write_text(json.dumps(dict(HYPERBOLIC, p_a=[1.0, 0.0])))
    cfg.write_text(json.dumps({"output_dir": "out2", "stages": [{"stage": "qlra", "input": "d.json"}]}))
    capsys.readouterr()
    assert main(["pipeline", "run", "--config", str(cfg)]) == 3
    record = json.loads(capsys.readouterr().err.strip())
    assert set(record) >= {"stage", "code", "message"}
    assert record["stage"] == "qlra"
