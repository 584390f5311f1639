import json

import pytest

from circleflow.cli import main
from circleflow.config import ConfigError, RunConfig


def run(tmp_path, capsys, *argv):
    code = main(list(argv) + ["--out-dir", str(tmp_path)])
    return code, json.loads(capsys.readouterr().out)


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(N=1000)
    with pytest.raises(ConfigError):
        RunConfig(family="nope")
    with pytest.raises(ConfigError):
        RunConfig(alpha="pi")


def test_config_round_trip():
    cfg = RunConfig(seed=7, family="fourier", coeffs=("0.02", "0.01+0.01j"))
    back = RunConfig.from_json(json.loads(cfg.dumps()))
    assert back == cfg


def test_dump_config(tmp_path, capsys):
    code, rep = run(tmp_path, capsys, "dump-config", "--seed", "5")
    assert code == 0 and rep["config_json"]["seed"] == 5
    cfg = RunConfig.from_json(json.loads((tmp_path / "config.json").read_text()))
    assert cfg.seed == 5


def test_measure_verb_matches_oracle(tmp_path, capsys):
    code, rep = run(tmp_path, capsys, "measure", "--family", "moebius", "--a", "0.3", "--s", "2")
    assert code == 0
    assert rep["checks"][0]["value"] < 1e-8
    assert (tmp_path / "measure.csv").read_text().startswith("theta")


def test_verify_rotation_semigroup(tmp_path, capsys):
    code, rep = run(tmp_path, capsys, "verify", "P5.1", "--family", "rotation")
    assert code == 0
    assert all(c["value"] == 0.0 for c in rep["reports"][0]["checks"])


def test_verify_generator(tmp_path, capsys):
    code, rep = run(tmp_path, capsys, "verify", "T1.2", "--family", "moebius", "--a", "0.3")
    assert code == 0
    assert abs(rep["reports"][0]["checks"][0]["value"] - 1) < 0.2


def test_unknown_suite_exit_code(tmp_path, capsys):
    assert main(["verify", "T9.9", "--out-dir", str(tmp_path)]) == 2


def test_failing_check_sets_exit_code(tmp_path, capsys):
    code, rep = run(tmp_path, capsys, "verify", "Fatou", "--tol", "fatou=1e-12")
    assert code == 1 and rep["status"] == "FAIL"
    failed = [c for c in rep["reports"][0]["checks"] if not c["pass"]]
    assert failed and {"value", "tolerance"} <= set(failed[0])
    assert rep["reports"][0]["params"]["seed"] == 0


def test_bad_tolerance_key(tmp_path):
    assert main(["verify", "Fatou", "--tol", "bogus=1", "--out-dir", str(tmp_path)]) == 2


@pytest.mark.parametrize("argv,artifact", [
    (["build-map", "--family", "fourier", "--coeffs", "0.03", "0.01+0.01j", "--N", "256"], "map.json"),
    (["herglotz", "--measure", "mixed", "--N", "256"], "boundary.csv"),
    (["map-exterior", "--curve", "ellipse", "--N", "256"], "correspondence.csv"),
    (["flow", "--t-end", "0.02", "--N", "256"], "trajectory.jsonl"),
])
def test_verbs_write_artifacts(tmp_path, capsys, argv, artifact):
    code, rep = run(tmp_path, capsys, *argv)
    assert code == 0 and rep["status"] == "PASS"
    assert (tmp_path / artifact).exists()
    assert (tmp_path / f"{argv[0]}_report.json").exists()


def test_outputs_are_deterministic(tmp_path, capsys):
    names = ("measure.csv", "measure.json", "measure_report.json")
    snapshots = []
    for _ in range(2):
        main(["measure", "--N", "256", "--out-dir", str(tmp_path)])
        snapshots.append([(tmp_path / n).read_bytes() for n in names])
    capsys.readouterr()
    assert snapshots[0] == snapshots[1]
