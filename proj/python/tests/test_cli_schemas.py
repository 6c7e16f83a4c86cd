import json

import jsonschema
import pytest

import lmrnn


def run(*args):
    code, out, err = lmrnn.run_cli(*args)
    assert code == 0, err
    return out


def test_diagnose_and_generate(tmp_path, schema):
    csv = tmp_path / "y.csv"
    run("generate", "--preset", "arfima-paper", "--n", "800", "--out", csv)
    assert len(csv.read_text().splitlines()) == 801
    run("diagnose", csv, "--max-lag", "40", "--out", tmp_path / "d")
    report = json.loads((tmp_path / "d" / "report.json").read_text())
    jsonschema.validate(report, schema("diagnosis"))


def test_check_and_impulse(tmp_path, schema):
    params = lmrnn.init_params("rnn", hidden=1, seed=1)
    jsonschema.validate(params, schema("cell_params"))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(params))
    jsonschema.validate(json.loads(run("check", "--config", path)), schema("verdict"))
    run("impulse", "--config", path, "--lags", "30", "--out", tmp_path / "i")
    jsonschema.validate(json.loads((tmp_path / "i" / "decay.json").read_text()), schema("impulse"))


def test_experiment_artifacts(tmp_path, schema):
    cfg = {
        "dataset": {"type": "arfima", "d": 0.3, "n": 300, "seed": 2},
        "split": {"n_train": 200, "n_val": 50, "n_test": 50},
        "models": [{"kind": "mrnnf", "hidden": 2, "K": 10}, {"kind": "rnn", "hidden": 2}],
        "stopping": {"max_steps": 5},
        "seeds": {"start": 1, "count": 3},
        "out": str(tmp_path / "runs"),
    }
    (tmp_path / "e.json").write_text(json.dumps(cfg))
    first = json.loads(run("experiment", "--config", tmp_path / "e.json"))
    second = json.loads(run("experiment", "--config", tmp_path / "e.json"))
    assert not first["reused"] and second["reused"]
    d = tmp_path / "runs" / first["digest"]
    read = lambda p: json.loads((d / p).read_text())
    jsonschema.validate(read("config.json"), schema("experiment"))
    jsonschema.validate(read("summary.json"), schema("experiment_summary"))
    jsonschema.validate(read("comparisons.json"), schema("comparisons"))
    for kind in ("mrnnf", "rnn"):
        jsonschema.validate(read(f"{kind}/runs.json"), schema("runs"))
        jsonschema.validate(read(f"{kind}/summary.json"), schema("summary"))
    welch = json.loads(run("compare", d / "mrnnf" / "metrics.csv", d / "rnn" / "metrics.csv"))
    jsonschema.validate(welch, schema("welch"))


def test_process_document(tmp_path, schema):
    y = lmrnn.generate({"preset": "rnn-process", "n": 100})
    assert y.shape == (100, 1)


@pytest.mark.parametrize("args,code", [(["generate"], 2), (["diagnose", "/nonexistent.csv"], 3)])
def test_exit_codes(args, code):
    assert lmrnn.run_cli(*args)[0] == code
