import json
import math

import numpy as np
import pytest

from metric_bounds.cli import main
from metric_bounds.harness import generate_synthetic
from metric_bounds.pairwise import save_csv


@pytest.fixture
def data_csv(tmp_path):
    path = tmp_path / "train.csv"
    save_csv(generate_synthetic(3, 16, 0.8, seed=5), path)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr()


def test_train_then_risk_and_margin(tmp_path, data_csv, capsys):
    model = str(tmp_path / "m.json")
    code, out = run(capsys, ["train", "--data", data_csv, "--task", "metric", "--norm", "l1",
                             "--lambda", "0.5", "--seed", "1", "--out", model, "--max-iters", "300"])
    assert code == 0
    assert json.loads(out.out)["final_objective"] <= 1.0 + 1e-4
    assert json.load(open(model))["norm"] == "l1"

    code, out = run(capsys, ["risk", "--data", data_csv, "--model", model])
    assert code == 0
    rep = json.loads(out.out)
    assert 0.0 <= rep["empirical_risk"] and rep["task"] == "metric"

    code, out = run(capsys, ["oracle", "margin", "--data", data_csv, "--model", model])
    assert code == 0 and json.loads(out.out)["passed"]


def test_rademacher_exact_vs_mc(data_csv, capsys):
    code, out = run(capsys, ["rademacher", "--data", data_csv, "--task", "similarity",
                             "--dual", "linf", "--exact"])
    assert code == 0
    exact = json.loads(out.out)
    assert exact["draws"] == 0 and exact["m"] == 8 and exact["dual_kind"] == "linf"
    code, out = run(capsys, ["rademacher", "--data", data_csv, "--task", "similarity",
                             "--dual", "linf", "--draws", "20000", "--seed", "3"])
    mc = json.loads(out.out)
    assert abs(mc["value"] - exact["value"]) <= 4 * mc["std_error"]


def test_bound_defaults_and_override(capsys):
    code, out = run(capsys, ["bound", "--norm", "fro", "--task", "metric", "--n", "100", "--d", "2",
                             "--lambda", "1", "--delta", "0.05"])
    assert code == 0
    rep = json.loads(out.out)
    assert rep["x_star"] == 2.0 and rep["r_n"] == pytest.approx(2 * 2 / 10)
    code, out = run(capsys, ["bound", "--norm", "fro", "--task", "metric", "--n", "100", "--d", "2",
                             "--lambda", "1", "--delta", str(math.exp(-2)), "--rn", "0", "--xstar", "0"])
    rep = json.loads(out.out)
    assert rep["total"] == pytest.approx(1.6) and rep["r_n_source"] == "given"


def test_experiment_deterministic_and_exit_code(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"task": "metric", "kind": "fro", "d": 3, "n_train": 12, "n_test": 16,
                               "lambda": 0.5, "delta": 0.05, "seed": 0, "domain": "unit_box",
                               "repeats": 2, "mc_draws": 100, "max_iters": 100}))
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        code, _ = run(capsys, ["experiment", "--config", str(cfg), "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_scaling(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"n_train": 10, "mc_draws": 50, "dims": [2, 4], "kinds": ["fro", "l1"]}))
    out = tmp_path / "s.csv"
    code, res = run(capsys, ["scaling", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    assert json.loads(res.out)["rows"] == 4
    assert out.read_text().splitlines()[0].startswith("d,kind,dual")


def test_oracles(tmp_path, capsys):
    code, out = run(capsys, ["oracle", "khinchin", "--f", "1,1", "--p", "2", "--q", "4"])
    assert code == 0 and json.loads(out.out)["lhs"] == pytest.approx(8 ** 0.25)
    table = tmp_path / "t.csv"
    idx = np.arange(1, 5)
    np.savetxt(table, idx[:, None] + idx[None, :], delimiter=",")
    code, out = run(capsys, ["oracle", "ustat", "--table", str(table)])
    assert code == 0 and json.loads(out.out)["rhs"] == pytest.approx(5.0)
    code, _ = run(capsys, ["oracle", "ustat", "--n", "6", "--seed", "2"])
    assert code == 0


def test_failed_oracle_exit_2(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("x1,label\n0.0,0\n1.0,1\n2.0,0\n")
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"d": 1, "b": -5.0, "M": [1.0], "task": "metric", "norm": "fro", "lambda": 1.0}))
    code, _ = run(capsys, ["oracle", "margin", "--data", str(data), "--model", str(model), "--tol", "0"])
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["bound", "--norm", "fro", "--task", "metric", "--n", "100", "--d", "2", "--lambda", "1", "--delta", "1.5"],
    ["bound", "--norm", "l1", "--task", "metric", "--n", "100", "--d", "1", "--lambda", "1", "--delta", "0.1"],
    ["bound", "--norm", "l7", "--task", "metric", "--n", "100", "--d", "2", "--lambda", "1", "--delta", "0.1"],
    ["risk", "--data", "/nonexistent.csv", "--model", "/nonexistent.json"],
    ["oracle", "khinchin", "--f", "1", "--p", "3", "--q", "2"],
    ["oracle", "ustat", "--n", "12"],
    [],
])
def test_invalid_input_exit_1(argv, capsys):
    assert main(argv) == 1


def test_bad_config_exit_1(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == 1
    cfg.write_text("{not json")
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == 1


def test_help_exit_0(capsys):
    assert main(["--help"]) == 0
