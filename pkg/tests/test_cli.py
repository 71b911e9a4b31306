import csv
import io
import json

import pytest

from caustics.cli import build_parser, main
from caustics.fourier import FourierSeries
from caustics.geometry import SupportFunction, ellipse_support


@pytest.fixture
def files(tmp_path):
    def dump(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj, indent=1))
        return str(path)

    return {
        "disc": dump("disc.json", SupportFunction.disc(1.0).to_dict()),
        "ellipse": dump("ellipse.json", ellipse_support(K=16).to_dict()),
        "even": dump("even.json", SupportFunction.from_modes({0: 1.0, 2: 0.05}, K=2).to_dict()),
        "odd": dump("odd.json", SupportFunction.from_modes({0: 1.0, 3: 0.01}, K=3).to_dict()),
        "p57": dump("p57.json", (FourierSeries.cos(5, K=8) + FourierSeries.cos(7, K=8)).to_dict()),
        "dir": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_disc(files, capsys):
    code, out, _ = run(["verify", "--input", files["disc"]], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1 and rep["passed"]
    assert [c["m"] for c in rep["caustics"]] == list(range(2, 8))
    assert all(c["identity_residual"] < 1e-12 for c in rep["caustics"])
    assert rep["config"]["tolerances"]["residual"] == 1e-12


def test_verify_ellipse_uses_newton(files, capsys):
    code, out, _ = run(["verify", "--input", files["ellipse"], "--m", "3"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["caustics"][0]["newton"]["converged"]


def test_width_check(files, capsys):
    code, out, _ = run(["width-check", "--input", files["even"]], capsys)
    assert code == 1 and json.loads(out)["offending_modes"] == [2]
    code, out, _ = run(["width-check", "--input", files["odd"]], capsys)
    assert code == 0 and json.loads(out)["constant_width"]


def test_obstruct_cos57(files, capsys):
    code, out, _ = run(["obstruct", "--input", files["p57"], "--l", "1"], capsys)
    rep = json.loads(out)
    assert code == 1
    bare = {row[0]: row[1] for row in rep["obstruction"]["bare_values"]}
    assert bare[2] == -0.25
    assert rep["certificate"]["verdict"] == "obstructed"


def test_obstruct_csv(files, capsys):
    code, out, _ = run(["obstruct", "--input", files["p57"], "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["n", "re", "im", "abs", "bare_re", "bare_im"]
    assert float(next(r for r in rows if r["n"] == "2")["bare_re"]) == -0.25


def test_obstruct_sweep(files, capsys):
    out_path = files["dir"] / "sweep.json"
    code, _, _ = run(["obstruct", "--iters", "20", "--K", "20", "--seed", "5", "--out", str(out_path)], capsys)
    rep = json.loads(out_path.read_text())
    assert code == 0 and rep["sweep"]["failed_triviality"] == 20


def test_obstruct_hypothesis_violation(files, capsys):
    path = files["dir"] / "even_p1.json"
    path.write_text(json.dumps(FourierSeries.cos(2, K=3).to_dict()))
    code, out, err = run(["obstruct", "--input", str(path)], capsys)
    assert code == 2 and "no_even_modes" in err
    assert json.loads(out)["exit_status"] == 2


def test_solve_caustic(files, capsys):
    code, out, _ = run(["solve-caustic", "--input", files["ellipse"], "--m", "3", "--base-points", "16"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["variational_residual"] < 1e-10 and rep["reflection_residual"] < 1e-8
    assert rep["candidate"]["rotation"] == [1, 3]


def test_orbit_csv(files, capsys):
    code, out, _ = run(["orbit", "--input", files["ellipse"], "--iters", "6", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["j", "t_j", "x_j", "y_j", "residual_j"]
    assert len(rows) == 1 + 8
    assert rows[1][4] == "" and rows[-1][4] == ""
    assert float(rows[3][4]) < 1e-10


def test_expand_random_and_input(files, capsys):
    code, out, _ = run(["expand", "--m", "3", "--seed", "2", "--K", "5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["source"] == "random"
    assert [r["order"] for r in rep["reports"]] == [1, 2]
    code, out, _ = run(["expand", "--m", "3", "--input", files["p57"]], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["first_order"]["status"] == "solved"


def test_deterministic_output(files, capsys):
    a = run(["verify", "--input", files["disc"], "--m", "2-3"], capsys)[1]
    b = run(["verify", "--input", files["disc"], "--m", "2-3"], capsys)[1]
    assert a == b


def test_parse_error_is_line_precise(files, capsys):
    bad = files["dir"] / "bad.json"
    bad.write_text('{\n "support": {\n  "K": 1,\n  "coeffs": [[0, 1, 0],]\n }\n}\n')
    code, out, err = run(["verify", "--input", str(bad)], capsys)
    assert code == 2
    assert "bad.json:4:" in err
    assert json.loads(out)["error"].startswith(str(bad) + ":4:")


def test_validation_errors(files, capsys):
    bad = files["dir"] / "mode.json"
    bad.write_text('{\n "support": {\n  "K": 1,\n  "real": true,\n  "coeffs": [[4, 1, 0]]\n }\n}\n')
    code, _, err = run(["verify", "--input", str(bad)], capsys)
    assert code == 2 and "outside" in err
    code, _, err = run(["width-check"], capsys)
    assert code == 2 and "--input" in err
    code, _, err = run(["verify", "--input", files["disc"], "--tol", "residual=-1"], capsys)
    assert code == 2 and "positive" in err
    code, _, err = run(["verify", "--input", files["disc"], "--tol", "oops"], capsys)
    assert code == 2
    code, _, err = run(["verify", "--input", str(files["dir"] / "missing.json")], capsys)
    assert code == 2 and "no such file" in err
    nonconvex = files["dir"] / "nc.json"
    nonconvex.write_text(json.dumps({"support": FourierSeries.from_modes({0: 1.0, 3: 0.3}, K=3, real=True).to_dict()}))
    code, _, err = run(["verify", "--input", str(nonconvex)], capsys)
    assert code == 2 and "convex" in err


def test_help_documents_csv_columns(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["orbit", "--help"])
    assert "j,t_j,x_j,y_j,residual_j" in capsys.readouterr().out


def test_csv_summary_for_other_commands(files, capsys):
    code, out, _ = run(["width-check", "--input", files["odd"], "--format", "csv"], capsys)
    rows = dict(csv.reader(io.StringIO(out)))
    assert code == 0 and rows["constant_width"] == "True" and rows["schema"] == "1"
