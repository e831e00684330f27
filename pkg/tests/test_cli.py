import csv
import io
import json
import shutil
import subprocess

import pytest

from radconvex.cli import RunReport, main, result_from_dict, result_to_dict

TIMING = ("started_at", "duration")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out), out


def strip_timing(d):
    return {k: v for k, v in d.items() if k not in TIMING}


# -- exit codes --------------------------------------------------------------


def test_classify_quartic(capsys):
    code, d, _ = run_json(capsys, "classify", "pow(4)")
    assert code == 0
    (prof,) = d["results"]
    assert prof["p_max_estimate"] == pytest.approx(4.0, abs=0.01)
    assert d["overall_pass"]


def test_classify_exp_minus_one_table(capsys):
    code, out, _ = run(capsys, "classify", "exptrunc(0)")
    assert code == 0
    assert "not 2-radical" in out


def test_classify_rejects_small_exponent(capsys):
    code, out, err = run(capsys, "classify", "pow(0.5)")
    assert code == 2
    assert out == "" and "pow exponent" in err


def test_verify_jensen2_batch(capsys):
    code, d, _ = run_json(capsys, "verify", "jensen2", "pow(4)", "--samples", "1000", "--seed", "7")
    assert code == 0
    assert len(d["results"]) == 1000 and d["overall_pass"]


def test_verify_split_violation(capsys):
    code, d, _ = run_json(capsys, "verify", "split", "series(1,1.0)")
    assert code == 1
    (r,) = d["results"]
    assert r["lhs"] == pytest.approx(11 / 32, abs=1e-12)
    assert r["rhs"] == pytest.approx(7 / 32, abs=1e-12)
    assert r["pass"] is False


def test_verify_hardy_sharp(capsys):
    code, d, _ = run_json(capsys, "verify", "hardy", "pow(3)", "--p", "3", "--a", "1", "--b", "2")
    assert code == 0
    (r,) = d["results"]
    assert abs(r["margin"]) <= 1e-6 * r["rhs"]


def test_numeric_failure_exit(capsys):
    # No x below 1 has 1/(1-x) - 1 >= 1e300: the inverse cannot be bracketed.
    code, _, err = run(capsys, "verify", "amgm", "geomtrunc(0)", "--points", "1e300,1")
    assert code == 3
    assert "numeric failure" in err


def test_usage_errors(capsys):
    assert run(capsys, "verify", "mradical", "pow(4)", "--m", "3")[0] == 2
    assert run(capsys, "verify", "jensen", "pow(2)")[0] == 2
    assert run(capsys, "verify", "hh1", "geomtrunc(0)", "--a", "2", "--b", "3")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["verify", "nosuch", "pow(2)"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "theorem, extra",
    [
        ("jensen", ["--points", "1,2,3", "--weights", "0.2,0.3,0.5"]),
        ("amgm", ["--points", "1,9"]),
        ("upper", ["--t", "0.3"]),
        ("superadd", ["--a", "1", "--b", "2"]),
        ("mradical", ["--m", "4"]),
        ("fourradical", []),
        ("identity", ["--a", "3", "--b", "7", "--t", "0.25"]),
        ("hh1", []),
        ("hh2", []),
        ("hhgen", []),
        ("unit", []),
        ("contjensen", ["--a", "0", "--b", "1", "--g", "pow(2)"]),
        ("avg", ["--p", "4", "--x", "1"]),
    ],
)
def test_every_theorem_runs_on_quartic(capsys, theorem, extra):
    code, d, _ = run_json(capsys, "verify", theorem, "pow(4)", *extra)
    assert code == 0, d
    for r in d["results"]:
        assert {"theorem_id", "margin", "pass"} <= set(r)


@pytest.mark.parametrize("theorem", ["jensen", "amgm", "hh2", "superadd", "avg", "upper", "mradical"])
def test_random_batches(capsys, theorem):
    code, d, _ = run_json(capsys, "verify", theorem, "exptrunc(2)", "--samples", "25", "--seed", "3")
    assert code == 0
    assert len(d["results"]) == 25


# -- bound -------------------------------------------------------------------


def test_bound_square(capsys):
    code, d, _ = run_json(capsys, "bound", "pow(2)", "--t", "0.5", "--a", "0", "--b", "2")
    assert code == 0
    r = d["results"][0]
    assert r["lhs_terms"] == {"main": 1.0, "refine": 1.0}
    assert r["rhs"] == 2.0


def test_bound_quartic_four_radical(capsys):
    code, d, _ = run_json(capsys, "bound", "pow(4)", "--m", "4", "--t", "0.5", "--a", "0", "--b", "2")
    assert code == 0
    r = d["results"][0]
    assert list(r["lhs_terms"].values()) == pytest.approx([1.0, 2.0, 1.0], abs=1e-12)
    assert r["rhs"] == 8.0


def test_bound_t_zero(capsys):
    code, d, _ = run_json(capsys, "bound", "pow(2)", "--t", "0")
    assert code == 0
    jensen, upper = d["results"]
    assert jensen["lhs_terms"] == {"main": 0.0, "refine": 0.0}
    assert jensen["rhs"] == 0.0
    assert list(upper["chain"].values()) == [0.0, 0.0, 0.0]


def test_bound_table_lists_terms(capsys):
    code, out, _ = run(capsys, "bound", "pow(4)", "--m", "4", "--t", "0.5", "--a", "0", "--b", "2")
    assert code == 0
    assert "k0=1" in out and "k1=2" in out and "rhs   : 8" in out


# -- serialization -----------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "exptrunc(1)", "--iters", "12"],
        ["verify", "jensen", "pow(3)", "--samples", "5", "--seed", "1"],
        ["verify", "hh2", "geomtrunc(1)", "--a", "0.1", "--b", "0.9"],
        ["verify", "split", "series(1,1.0)"],
        ["bound", "pow(4)", "--m", "4"],
    ],
)
def test_json_round_trip_is_byte_identical(capsys, argv):
    _, _, text = run_json(capsys, *argv)
    again = RunReport.from_json(text).to_json() + "\n"
    assert again == text


def test_result_dict_round_trip(capsys):
    _, d, _ = run_json(capsys, "classify", "pow(2)", "--iters", "10")
    prof = result_from_dict(d["results"][0])
    assert result_to_dict(prof) == d["results"][0]
    with pytest.raises(TypeError):
        result_to_dict(object())


def test_determinism_modulo_timing(capsys):
    argv = ("verify", "jensen2", "neglogtrunc(1)", "--samples", "50", "--seed", "123")
    _, first, _ = run_json(capsys, *argv)
    _, second, _ = run_json(capsys, *argv)
    assert strip_timing(first) == strip_timing(second)
    assert json.dumps(strip_timing(first)) == json.dumps(strip_timing(second))


def test_seed_from_environment(capsys, monkeypatch):
    argv = ("verify", "superadd", "pow(3)", "--samples", "10")
    _, explicit, _ = run_json(capsys, *argv, "--seed", "42")
    monkeypatch.setenv("RADCONVEX_SEED", "42")
    _, from_env, _ = run_json(capsys, *argv)
    assert strip_timing(explicit) == strip_timing(from_env)
    monkeypatch.setenv("RADCONVEX_SEED", "x")
    with pytest.raises(SystemExit):
        main(list(argv))


def test_schema_fields(capsys):
    _, d, _ = run_json(capsys, "classify", "pow(2)", "--iters", "8")
    assert {"tool_version", "command", "spec_text", "started_at", "duration", "overall_pass", "results"} <= set(d)
    for argv in (("verify", "hardy", "pow(2)"), ("verify", "jensen2", "pow(2)"), ("classify", "pow(3)")):
        _, d, _ = run_json(capsys, *argv)
        for r in d["results"]:
            assert {"theorem_id", "margin", "pass"} <= set(r)


def test_csv_output(capsys):
    code, out, _ = run(capsys, "verify", "jensen", "pow(2)", "--samples", "4", "--seed", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theorem_id", "spec", "params", "lhs", "rhs", "margin", "pass"]
    assert len(rows) == 5
    assert all(row[0] == "JENSEN_N" and row[1] == "pow(2)" for row in rows[1:])
    json.loads(rows[1][2])


@pytest.mark.skipif(shutil.which("radconvex") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["radconvex", "verify", "split", "series(1,1.0)"], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert "SPLIT_INT" in proc.stdout and "FAIL" in proc.stdout
