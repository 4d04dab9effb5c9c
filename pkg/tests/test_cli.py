import json

import pytest

from conebranch.cli import clean, run_capture


def test_operator_dpi_pretty():
    code, out, _ = run_capture(["operator", "dpi", "--family", "spin", "--dim", "2", "--lambda", "3"])
    assert code == 0
    assert out.strip().splitlines()[-1] == "(2−v₁²)∂₁² − 6v₁∂₁"
    assert "# seed=42" in out and "# samples=100000" in out and "# algebra_hash=" in out


def test_branch_table_csv():
    code, out, _ = run_capture(["branch", "table", "--family", "spin", "--dim", "4", "--lambda", "3", "--pmax", "3",
                                "--format", "csv"])
    assert code == 0
    rows = [line for line in out.splitlines() if not line.startswith("#")]
    assert rows[0].startswith("p,lambda,mult")
    assert [int(r.split(",")[2]) for r in rows[1:]] == [1, 3, 6, 10]


def test_branch_table_json_metadata():
    code, out, _ = run_capture(["branch", "table", "--family", "sym", "--size", "2", "--lambda", "3/2", "--pmax", "2",
                                "--seed", "7", "--samples", "500"])
    data = json.loads(out)
    assert code == 0
    assert data["metadata"]["seed"] == 7 and data["metadata"]["samples"] == 500
    assert data["table"]["alpha"] == "3/1"
    assert [r["mult"] for r in data["table"]["rows"]] == [1, 2, 3]


def test_verify_eigen_exit_zero():
    code, out, _ = run_capture(["verify", "eigen", "--family", "sym", "--size", "2", "--lambda", "4", "--pmax", "3"])
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_failure_exit_one():
    code, out, _ = run_capture(["verify", "sl2", "--family", "spin", "--dim", "2", "--lambda", "3", "--samples",
                                "20000", "--format", "pretty"])
    assert code == 1
    assert "[FAIL] 9 casimir identity" in out


def test_unknown_flag_exit_two():
    code, out, err = run_capture(["algebra", "info", "--family", "spin", "--dim", "3", "--frobnicate"])
    assert code == 2 and out == ""
    assert "usage:" in err


def test_bad_value_exit_two():
    code, _, err = run_capture(["algebra", "info", "--family", "spin", "--dim", "1"])
    assert code == 2 and "error" in err
    code, _, err = run_capture(["orthopoly", "build", "--family", "spin", "--dim", "2"])
    assert code == 2


def test_algebra_info_json():
    code, out, _ = run_capture(["algebra", "info", "--family", "herm", "--size", "2"])
    data = json.loads(out)
    assert code == 0 and data["algebra"]["n"] == 4 and data["algebra"]["r"] == 2 and data["algebra"]["d"] == "2/1"


def test_orthopoly_build_json():
    code, out, _ = run_capture(["orthopoly", "build", "--family", "spin", "--dim", "2", "--lambda", "3", "--p", "2"])
    data = json.loads(out)
    assert code == 0 and data["basis"]["p"] == 2 and len(data["basis"]["polys"]) == 1


def test_rep_file(tmp_path):
    rep = {"kind": "scalar", "lambda": "4/1"}
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(rep))
    code, out, _ = run_capture(["operator", "dpi", "--family", "spin", "--dim", "2", "--rep-file", str(path)])
    assert code == 0 and out.strip().endswith("(2−v₁²)∂₁² − 8v₁∂₁")


def test_output_file(tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run_capture(["branch", "table", "--family", "spin", "--dim", "3", "--lambda", "3", "--pmax", "1",
                                "--format", "csv", "--output", str(path)])
    assert code == 0 and out == ""
    assert "p,lambda,mult" in path.read_text()


@pytest.mark.parametrize("argv", [
    ["verify", "gamma", "--samples", "30000", "--seed", "3"],
    ["verify", "strat", "--family", "sym", "--size", "2", "--lambda", "3", "--samples", "20000", "--pmax", "2"],
])
def test_byte_identical(argv):
    assert run_capture(argv) == run_capture(argv)


def test_clean_floats():
    out = clean({"a": 1 / 3, "b": [2.0, complex(1, 2)], "c": float("nan")})
    assert out == {"a": 0.333333333333, "b": [2.0, [1.0, 2.0]], "c": "nan"}
