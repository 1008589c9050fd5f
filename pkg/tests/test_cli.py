import csv
import json
import math

import pytest

from corrtherm import scenario as sc
from corrtherm.cli import main


def write(tmp_path, data, name="scn.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


@pytest.mark.parametrize("demo", ["example1", "example2", "erasure", "zeroth"])
def test_demos_pass(demo, capsys):
    assert main(["demo", demo]) == 0
    assert "ALL PASS" in capsys.readouterr().out


def test_demo_anomalous_writes_outputs(tmp_path, capsys):
    assert main(["demo", "anomalous", "--restarts", "1", "--out", str(tmp_path)]) == 0
    reports = sc.read_reports(tmp_path / "demo-anomalous.report.json")
    assert {r.law.value for r in reports} == {"ClausiusGeneralized", "COP"}
    rows = list(csv.DictReader((tmp_path / "demo-anomalous.summary.csv").open()))
    assert all(r["verdict"] == "pass" for r in rows)


def test_check_round_trip(tmp_path):
    path = write(tmp_path, {"kind": "example2", "parameters": {"p": [0.5, 0.5], "T": 1.0}})
    assert main(["check", str(path), "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "scn.report.json").read_text())
    assert data["all_passed"]
    assert data["extras"]["box1"]["ancilla_qubits"] == 2
    land = [r for r in sc.read_reports(tmp_path / "scn.report.json") if r.law.value == "LandauerGeneralized"][0]
    assert land.flags["classic_landauer_violated"]
    assert land.quantities["heat_absorbed_by_system"] == pytest.approx(math.log(2), abs=1e-12)


def test_failing_verdict_exits_2(tmp_path):
    path = write(tmp_path, {"kind": "example2", "parameters": {"p": [0.5, 0.5], "T": 1.0}, "checks": ["landauer_classic"]})
    assert main(["check", str(path)]) == 2


def test_custom_scenario(tmp_path):
    swap = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    # |0><0| (x) I/2 swapped into I/2 (x) |0><0|
    rho = [[0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    data = {
        "kind": "custom",
        "parameters": {
            "dims": [2, 2], "initial": rho, "unitary": swap,
            "H_first": [[0, 0], [0, 0]], "H_second": [[0, 0], [0, 0]], "T": 1.0,
        },
    }
    assert main(["check", str(write(tmp_path, data)), "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "scn.report.json").read_text())
    q = out["reports"][0]["quantities"]
    assert q["dS_second"] == pytest.approx(-math.log(2), abs=1e-12)
    assert q["dS_cond"] == pytest.approx(math.log(2), abs=1e-12)


@pytest.mark.parametrize("data, needle", [
    ({"kind": "example1", "parameters": {"p": [0.5, 0.5]}}, "'T' is a required property"),
    ({"kind": "two_bath", "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": 5.0}}, "PSD bound"),
    ({"kind": "nope", "parameters": {}}, "field 'kind'"),
    ({"kind": "example1", "parameters": {"p": [0.9, 0.3], "T": 1.0}}, "sum to 1"),
])
def test_input_errors_exit_1(tmp_path, capsys, data, needle):
    assert main(["check", str(write(tmp_path, data))]) == 1
    assert needle in capsys.readouterr().err


def test_malformed_json_reports_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"kind": "example1",\n  "parameters": }')
    assert main(["check", str(p)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path):
    assert main(["check", str(tmp_path / "absent.json")]) == 1


def test_sweep_csv(tmp_path, capsys):
    path = write(tmp_path, {"kind": "two_bath", "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": "max", "grid_points": 200}})
    assert main(["sweep", str(path), "--param", "theta", "--range", "0:3.14:7"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 7
    assert [float(r["value"]) for r in rows][-1] == pytest.approx(3.14)
    assert all(float(r["clausius_slack"]) >= -1e-7 for r in rows)


def test_sweep_alpha_to_max(tmp_path):
    path = write(tmp_path, {"kind": "two_bath", "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": 0.0, "grid_points": 200}})
    assert main(["sweep", str(path), "--param", "alpha", "--range", "0:max:4", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "scn.sweep-alpha.csv").open()))
    assert float(rows[0]["dQ_A"]) <= 1e-9
    assert float(rows[-1]["dQ_A"]) > 0


def test_bad_range_exits_1(tmp_path):
    path = write(tmp_path, {"kind": "two_bath", "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": "max"}})
    assert main(["sweep", str(path), "--param", "theta", "--range", "0:max:4"]) == 1


def test_optimize_command(tmp_path):
    data = {"kind": "two_bath", "parameters": {"gap": 1, "T_A": 1, "T_B": 2, "alpha": "max", "grid_points": 1000},
            "optimizer": {"restarts": 1, "max_iters": 40}}
    assert main(["optimize", str(write(tmp_path, data)), "--seed", "3", "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "scn.report.json").read_text())
    assert out["scenario"]["optimizer"]["seed"] == 3
    assert out["extras"]["search"]["best_objective"] > 0
