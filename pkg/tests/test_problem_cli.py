import csv
import io
import json
from pathlib import Path

import pytest

from jordancone.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, run
from jordancone.problem import ProblemError, load_problem

ROOT = Path(__file__).resolve().parent.parent
Y_AXIS = ROOT / "problems" / "y_axis.json"
BRANCH = ROOT / "problems" / "cusp_branch_perturbed.json"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


def test_load_problem_parses_rationals():
    p = load_problem(json.loads(BRANCH.read_text()))
    assert p.options.shift == 2
    assert p.G.components[0].terms[(0, 5)].denominator == 100


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(equations=[]),
    lambda d: d.update(field="quaternion"),
    lambda d: d["curve"].update(coefficients=[[0, 0, 0], [0, 1, 0]]),
    lambda d: d["equations"][0][0].update(exps=[1]),
    lambda d: d["equations"][0][0].update(coeff="one"),
    lambda d: d["curve"].update(coefficients=[[1, 0], [0, 1]]),
])
def test_schema_errors(mutate, tmp_path):
    data = json.loads(Y_AXIS.read_text())
    mutate(data)
    with pytest.raises((ProblemError, ValueError)):
        load_problem(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, err = call("analyze", path)
    assert code == EXIT_INPUT and out == "" and err


def test_missing_file_is_input_error(tmp_path):
    assert call("gate", tmp_path / "absent.json")[0] == EXIT_INPUT


@pytest.mark.parametrize("cmd", ["analyze", "gate", "solve", "degree", "levelset"])
def test_commands_are_deterministic(cmd):
    a, b = call(cmd, Y_AXIS), call(cmd, Y_AXIS)
    assert a[0] == EXIT_OK and a[1] == b[1]
    rep = json.loads(a[1])
    assert rep["status"] == "ok" and rep["command"] == cmd


def test_solve_report_contents():
    code, out, _ = call("solve", BRANCH)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["gate"]["route"] == "corollary4"
    assert all(s["g_norm"] <= s["bound"] for s in rep["solution"]["samples"])


def test_gate_failure_exits_negative(tmp_path):
    data = json.loads(BRANCH.read_text())
    data["equations"][0][2]["coeff"] = "1"
    path = tmp_path / "unperturbed.json"
    path.write_text(json.dumps(data))
    code, out, _ = call("solve", path)
    assert code == EXIT_NEGATIVE
    assert json.loads(out)["status"] != "ok"


def test_flag_overrides_shift():
    code, out, _ = call("gate", Y_AXIS, "--shift", "0")
    rep = json.loads(out)
    assert rep["input"]["options"]["shift"] == 0
    # a gate with no route is still a complete answer
    assert code == EXIT_OK
    assert rep["gate"]["route"] is None and rep["gate"]["no_zero_in_cone"]


def test_levelset_csv(tmp_path):
    path = tmp_path / "ls.csv"
    code, _, _ = call("levelset", Y_AXIS, "--csv", path)
    assert code == EXIT_OK
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["eps", "phi0", "nk1_0", "z_x", "z_y", "G0", "residual"]
    assert len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)


def test_milnor_command():
    code, out, _ = call("milnor", "--ks", 3, 11, "--ord", 4)
    assert code == EXIT_OK and json.loads(out)["milnor"]["mu"] == 11
    code, out, _ = call("milnor", Y_AXIS, "--ks", 3, 11)
    assert json.loads(out)["milnor"]["mu"] == 11
    assert call("milnor", "--ks", 1, "--ord", 4)[0] == EXIT_NEGATIVE
    assert call("milnor", "--ks", 1)[0] == EXIT_INPUT


def test_perturb_command():
    code, out, _ = call("perturb", Y_AXIS, "--kind", "map", "--alpha", "1/1000", "--count", 3, "--seed", 7)
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "ok"


def test_verify_round_trip(tmp_path):
    stored = tmp_path / "report.json"
    assert call("solve", BRANCH, "--out", stored)[0] == EXIT_OK
    code, out, _ = call("verify", stored)
    assert code == EXIT_OK, out
    rep = json.loads(stored.read_text())
    rep["analysis"]["k"] = 4
    stored.write_text(json.dumps(rep))
    code, out, _ = call("verify", stored)
    assert code == EXIT_NEGATIVE and json.loads(out)["status"] == "mismatch"


def test_verify_rejects_foreign_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{}")
    assert call("verify", path)[0] == EXIT_INPUT
