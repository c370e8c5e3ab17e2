import csv
import io
import json
import subprocess
import sys

import pytest

from discrete_appell.cli import (
    EXIT_DIVERGENT,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    format_complex,
    parse_complex,
    run,
)
from discrete_appell.functions import eval_classical_f1
from discrete_appell.verification import Report

BASE = ["--a", "1", "--b1", "1", "--b2", "1", "--c", "2"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("text, value", [
    ("1", 1), ("-0.5", -0.5), ("2i", 2j), ("i", 1j), ("-i", -1j), ("1.5-2i", 1.5 - 2j),
    ("1e-3+1e-2i", 1e-3 + 1e-2j), ("3+i", 3 + 1j), (" 0.25 ", 0.25),
])
def test_parse_complex(text, value):
    assert parse_complex(text, "x") == value


@pytest.mark.parametrize("text", ["", "abc", "1+", "2j", "1+2", "--1"])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError):
        parse_complex(text, "x")


def test_format_complex_round_trip():
    for z in (0.5, -1.25 + 3j, 1e-20 - 2e5j):
        assert parse_complex(format_complex(z), "x") == z


def test_eval_terminating_example():
    code, out, _ = call("eval", "--fn", "f1d1", "--a", "1", "--b1", "1", "--b2", "3.7", "--c", "1",
                        "--t1", "2", "--t2", "1.5", "--k1", "1", "--x", "0.5", "--output", "json")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["verdict"] == "Terminated"
    assert parse_complex(record["value"], "value") == 2.5


def test_eval_origin_is_one():
    code, out, _ = call("eval", "--fn", "f1d2", *BASE, "--t", "3", "--k", "2", "--output", "json")
    assert code == EXIT_OK
    assert parse_complex(json.loads(out)["value"], "value") == 1


def test_eval_classical_matches_reference():
    code, out, _ = call("eval", "--fn", "f1", "--a", "1.2", "--b1", "0.7", "--b2", "2.1", "--c", "2.9",
                        "--x", "0.3", "--y", "-0.2+0.1i", "--output", "json")
    assert code == EXIT_OK
    ref = eval_classical_f1(1.2, 0.7, 2.1, 2.9, 0.3, -0.2 + 0.1j).value
    assert abs(parse_complex(json.loads(out)["value"], "value") - ref) < 1e-14


def test_eval_negative_complex_value():
    code, out, _ = call("eval", "--fn", "f1", *BASE, "--x", "-0.3", "--y", "-0.1+0.2i")
    assert code == EXIT_OK
    code2, out2, _ = call("eval", "--fn", "f1", *BASE, "--x=-0.3", "--y=-0.1+0.2i")
    assert out == out2


def test_eval_formal_regime_exit_two():
    code, out, _ = call("eval", "--fn", "f1d1", *BASE, "--t1", "0.5", "--k1", "1", "--x", "0.2")
    assert code == EXIT_DIVERGENT
    assert "DivergenceSuspected" in out


def test_eval_pole_exit_one():
    code, _, err = call("eval", "--fn", "f1d1", "--a", "1", "--b1", "1", "--b2", "1", "--c", "0", "--x", "0.1")
    assert code == EXIT_ERROR
    assert err


@pytest.mark.parametrize("argv", [
    ["eval", "--fn", "f1d1", *BASE, "--t", "3"],
    ["eval", "--fn", "f1d1", *BASE, "--bogus", "1"],
    ["eval", "--fn", "f1d1", "--a", "1"],
    ["eval", "--fn", "nope", *BASE],
    ["eval", "--fn", "f1d1", *BASE, "--k1", "-1"],
    ["eval", "--fn", "f1d1", *BASE, "--x", "zz"],
    ["verify", "--families", "no_such_family"],
    ["verify", "--regime", "formal"],
    ["verify", "--tol", "algebraic"],
    ["table", "--fn", "f1", *BASE, "--x-range", "-1.5", "0.5", "3", "--y-range", "0", "0", "1"],
    ["list-identities", "--catalogue", "Nope"],
    [],
    ["frobnicate"],
])
def test_usage_errors(argv):
    code, _, err = call(*argv)
    assert code == EXIT_USAGE
    assert "usage" in err


def test_verify_empty_family_list():
    code, out, _ = call("verify", "--families", "", "--count", "3")
    assert code == EXIT_OK
    report = Report.from_json(out)
    assert report.families == []


def test_verify_alias_classical():
    code, out, _ = call("verify", "--regime", "classical", "--count", "5", "--families", "Reduction3_3")
    assert code == EXIT_OK
    report = Report.from_json(out)
    assert report.ok and report.suite == "classical-5"
    assert all(f.passed == 5 for f in report.families)


def test_verify_impossible_tolerance_fails():
    code, out, _ = call("verify", "--count", "3", "--families", "integral_euler", "--tol", "integral=1e-30")
    assert code == EXIT_ERROR
    assert not Report.from_json(out).ok


def test_verify_csv():
    code, out, _ = call("verify", "--count", "2", "--families", "theta_power,phi_power", "--output", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["id", "pass", "fail", "skip", "worst_residual"]
    assert [r[0] for r in rows[1:]] == ["theta_power", "phi_power"]


def test_verify_deterministic():
    argv = ("verify", "--count", "3", "--seed", "11", "--families", "recursion_c_minus,finite_sum_b2")
    a = Report.from_json(call(*argv)[1])
    b = Report.from_json(call(*argv)[1])
    assert a.same_results(b)


def test_table_grid_matches_classical():
    code, out, _ = call("table", "--fn", "f1", "--a", "1.2", "--b1", "0.7", "--b2", "2.1", "--c", "2.9",
                        "--x-range", "-0.3", "0.3", "3", "--y-range", "-0.2", "0.2", "3")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["x", "y", "re", "im", "verdict"]
    assert len(rows) == 9
    assert [float(r["x"]) for r in rows[:3]] == [-0.3, -0.3, -0.3]
    for r in rows:
        ref = eval_classical_f1(1.2, 0.7, 2.1, 2.9, float(r["x"]), float(r["y"])).value
        assert abs(complex(float(r["re"]), float(r["im"])) - ref) < 1e-12


def test_table_marks_divergent_cells():
    code, out, _ = call("table", "--fn", "f1d1", *BASE, "--t1", "0.5", "--k1", "1",
                        "--x-range", "0", "0.2", "2", "--y-range", "0", "0", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["verdict"] != "divergent" and rows[0]["re"] == "1.0"
    assert rows[1]["verdict"] == "divergent" and rows[1]["re"] == ""


def test_integral_check_euler():
    code, out, _ = call("integral-check", "--fn", "f1d1", "--kind", "euler", *BASE,
                        "--x", "0.5", "--y", "0.5", "--output", "json")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["pass"] and record["residual"] < 1e-7
    assert abs(parse_complex(record["integral"], "v") - 2) < 1e-12


def test_integral_check_unknown_kind():
    code, _, _ = call("integral-check", "--fn", "f1d2", "--kind", "laplace_t1", *BASE)
    assert code == EXIT_USAGE


def test_list_identities():
    code, out, _ = call("list-identities", "--output", "json")
    assert code == EXIT_OK
    ids = [row["id"] for row in json.loads(out)]
    assert "reduction_classical_f1" in ids and len(ids) == len(set(ids))
    code, out, _ = call("list-identities", "--catalogue", "RecursionDiff28")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 28
    code, out, _ = call("list-identities", "--aliases", "--output", "json")
    assert "Reduction3_3" in json.loads(out)


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "discrete_appell.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert "verify" in proc.stdout


def test_humbert_parameters_follow_the_limit():
    code, out, _ = call("eval", "--fn", "phi2d1", "--b1", "1", "--b2", "1", "--c", "2", "--x", "0.1",
                        "--output", "json")
    assert code == EXIT_OK
    # phi2 at y = 0 is 1F1(1; 2; x) = (e^x - 1) / x
    assert abs(parse_complex(json.loads(out)["value"], "v") - 1.0517091807564762) < 1e-14
    assert call("eval", "--fn", "phi2d1", "--a", "1", "--b1", "1", "--b2", "1", "--c", "2")[0] == EXIT_USAGE
    assert call("eval", "--fn", "phi1d2", "--a", "1", "--b1", "1", "--c", "2", "--t", "3", "--k", "1")[0] == EXIT_OK
    assert call("eval", "--fn", "phi3d2", "--b1", "1", "--c", "2", "--b2", "1")[0] == EXIT_USAGE
