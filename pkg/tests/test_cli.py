import csv
import io
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from fvmotion import __version__
from fvmotion import telegraph as tg
from fvmotion.cli import fmt_number, main, to_json


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    head, body = text.split("\n", 1)
    assert head.startswith("# ")
    meta = json.loads(head[2:])
    rows = list(csv.reader(io.StringIO(body)))
    return meta, rows[0], rows[1:]


def test_telegraph_density_grid(capsys):
    code, out, _ = run(capsys, "telegraph", "density", "--lambda", "1", "--c", "1", "--t", "1", "--grid", "5")
    assert code == 0
    meta, cols, rows = parse_csv(out)
    assert meta["tool"] == "fvmotion" and meta["version"] == __version__
    assert meta["config"]["lam"] == 1.0 and meta["config"]["grid"] == 5
    assert len(rows) == 5
    x = float(rows[2][0])
    assert float(rows[2][1]) == pytest.approx(tg.density(tg.TelegraphParams(1.0, 1.0), x, 1.0), rel=1e-15)


def test_json_output(capsys):
    code, out, _ = run(capsys, "euler", "--n", "2", "--a", "1", "--theta", "1", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["meta"]["command"] == "euler"
    assert body["columns"] == ["power", "coefficient"]
    assert [r[1] for r in body["rows"]] == [0, -1, 1]


def test_euler_evaluation_points(capsys):
    code, out, _ = run(capsys, "euler", "--n", "2", "--a", "1", "--theta", "1", "--x", "2", "--x", "3",
                       "--format", "json")
    assert code == 0
    # x^2 - x at 2 and 3
    assert json.loads(out)["meta"]["values"] == [[2, 2], [3, 6]]
    assert run(capsys, "euler", "--n", "2", "--a", "1", "--theta", "0")[0] == 3


def test_out_file(tmp_path, capsys):
    path = tmp_path / "moments.csv"
    code, out, _ = run(capsys, "telegraph", "moments", "--n", "4", "--out", str(path))
    assert code == 0 and out == ""
    meta, cols, rows = parse_csv(path.read_text())
    assert meta["command"] == "telegraph moments"
    assert len(rows) == 5


@pytest.mark.parametrize("args", [
    ["telegraph", "sample", "--replicas", "500", "--seed", "3"],
    ["motion1d", "sample", "--family", "logistic", "--replicas", "200", "--seed", "3"],
    ["planar", "sample", "--replicas", "200", "--seed", "3"],
    ["dirdep", "sample", "--replicas", "200", "--seed", "3"],
    ["timevar", "sample", "--sigma", "linear", "--replicas", "200", "--seed", "3"],
    ["geo2d", "sample", "--p", "0.3", "--replicas", "200", "--seed", "3"],
])
def test_sampling_is_deterministic(args, capsys):
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    other = list(args)
    other[-1] = "4"
    assert run(capsys, *other)[1] != out1


@pytest.mark.parametrize("cmd", ["motion1d", "planar", "dirdep", "timevar", "geo2d"])
def test_sampling_needs_seed(cmd, capsys):
    extra = ["--family", "logistic"] if cmd == "motion1d" else []
    code, _, err = run(capsys, cmd, "sample", *extra)
    assert code == 2 and "seed" in err
    assert run(capsys, "telegraph", "sample")[0] == 2


@pytest.mark.parametrize("args", [
    ["telegraph", "density", "--lambda", "-1"],
    ["telegraph", "density", "--c", "0"],
    ["planar", "boundary", "--p", "1.5"],
    ["motion1d", "explode"],
    ["timevar", "cov", "--sigma", "table"],
    ["nosuchcommand"],
])
def test_usage_errors_exit_2(args, capsys):
    assert run(capsys, *args)[0] == 2


def test_domain_error_exits_3(capsys):
    # the power family leaves its domain at t* = x0^(1-alpha) / ((1-alpha) c) = 2
    code, _, err = run(capsys, "motion1d", "support", "--family", "power", "--variant", "reflect",
                       "--x0", "1", "--t", "2.5")
    assert code == 3 and err.startswith("Error:")


def test_motion1d_outputs(capsys):
    code, out, _ = run(capsys, "motion1d", "support", "--family", "logistic", "--x0", "0.5", "--t", "1.0986122886681098")
    assert code == 0
    _, cols, rows = parse_csv(out)
    assert cols == ["endpoint", "location", "atom_mass"]
    assert [float(r[1]) for r in rows] == pytest.approx([0.25, 0.75], rel=1e-12)
    assert [float(r[2]) for r in rows] == pytest.approx([1 / 6, 1 / 6], rel=1e-12)
    code, out, _ = run(capsys, "motion1d", "moment", "--family", "logistic", "--x0", "0.5", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row[0] == pytest.approx(0.5, abs=1e-9) and row[-1] is False


def test_other_analytic_commands(capsys):
    for args in (["planar", "density", "--grid", "5"], ["planar", "boundary"], ["planar", "support"],
                 ["dirdep", "mean"], ["dirdep", "condmean", "--n", "3"], ["timevar", "cov", "--sigma", "linear"],
                 ["timevar", "limit"], ["geo2d", "density", "--p", "0.3", "--grid", "4"],
                 ["geo2d", "limit", "--p", "0.3", "--grid", "4"], ["geo2d", "params", "--p", "0.25"],
                 ["telegraph", "cdf", "--grid", "11"]):
        code, out, err = run(capsys, *args)
        assert code == 0, (args, err)
        meta, cols, rows = parse_csv(out)
        assert rows and all(len(r) == len(cols) for r in rows)


def test_timevar_table(tmp_path, capsys):
    table = tmp_path / "sigma.csv"
    table.write_text("t,sigma\n0,0\n0.5,0.5\n1,1\n2,2\n")
    code, out, _ = run(capsys, "timevar", "cov", "--sigma", "table", "--table", str(table), "--format", "json")
    assert code == 0
    code2, out2, _ = run(capsys, "timevar", "cov", "--sigma", "linear", "--format", "json")
    v1 = json.loads(out)["rows"][0][-1]
    v2 = json.loads(out2)["rows"][0][-1]
    assert v1 == pytest.approx(v2, rel=1e-9)
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n1,oops\n")
    assert run(capsys, "timevar", "cov", "--sigma", "table", "--table", str(bad))[0] == 2


def test_accept_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["accept", "--suite", "primary", "--seed", "42", "--n", "20000", "--out", str(a)]) == 0
    assert main(["accept", "--suite", "primary", "--seed", "42", "--n", "20000", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    body = json.loads(a.read_text())
    assert body["meta"]["config"]["seed"] == 42
    assert all(r["verdict"] == "pass" for r in body["reports"])
    assert {"name", "estimate", "se", "n", "seed", "target", "k", "verdict"} <= set(body["reports"][0])


def test_accept_requires_seed(capsys):
    assert run(capsys, "accept", "--suite", "primary")[0] == 2


def test_number_formatting_round_trips():
    for x in (0.1, 1 / 3, 1e-300, -2.5e17, np.float64(np.pi)):
        assert float(fmt_number(x)) == x
    assert fmt_number(3) == "3" and fmt_number(True) == "true"
    assert json.loads(to_json({"a": [1, 2.5, None], "b": {"c": "x"}})) == {"a": [1, 2.5, None], "b": {"c": "x"}}


@pytest.mark.skipif(shutil.which("fvmotion") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["fvmotion", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
    res = subprocess.run(["fvmotion", "telegraph", "density", "--lambda", "-1"], capture_output=True, text=True)
    assert res.returncode == 2
    res = subprocess.run([sys.executable, "-m", "fvmotion.cli", "euler", "--n", "1", "--a", "1", "--theta", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
