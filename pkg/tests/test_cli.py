import io
import json

import pytest

from oddsymp.cli import main
from oddsymp.geometry import Chart, compose, dump_transformation, make_diffeo, make_fiber_shift
from oddsymp.superlinalg import SuperMatrix, format_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


@pytest.mark.parametrize(
    "argv, want",
    [
        (["delta", "x1*xi1"], "1"),
        (["bracket", "x1", "xi1"], "1"),
        (["fourier", "xi1"], "1"),
        (["homotopy", "x1"], "0"),
        (["d2", "x1*xi1"], "[-1]"),
        (["e1", "dx1*(1 + dxi1*x1)"], "[1]"),
        (["cohomology", "--n", "2", "--degree-max", "2"], "dimension 1: xi1*xi2"),
        (["relation", "2", "x1*xi1*dx1", "-dx1"], "feasible: alpha1 = -x1; alpha2 = 0"),
        (["relation", "1", "x1*xi1*dx1", "dx1"], "infeasible: no chain exists in any degree"),
    ],
)
def test_verbs(capsys, argv, want):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == want


def test_structured_output(capsys):
    code, out, _ = run(capsys, "delta", "x1*xi1", "--format", "structured")
    assert code == 0
    assert json.loads(out) == {"result": "1", "schema": "oddsymp.result/1", "verb": "delta"}


def test_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("x1*xi1\n"))
    assert run(capsys, "delta", "-")[:2] == (0, "1")


@pytest.mark.parametrize(
    "argv, code, name",
    [
        (["delta", "x1 + * 2"], 3, "parse-error"),
        (["delta", "y1"], 3, "parse-error"),
        (["e1", "x1"], 8, "not-closed"),
        (["master", "x1*xi1", "x1"], 11, "precondition"),
        (["ber", "/nonexistent/matrix.txt"], 10, "io-error"),
    ],
)
def test_errors_are_json_on_stderr(capsys, argv, code, name):
    got, out, err = run(capsys, *argv)
    assert got == code and out == ""
    data = json.loads(err)
    assert data["code"] == code and data["error"] == name


def test_parse_error_reports_position(capsys):
    _, _, err = run(capsys, "delta", "x1 + * 2")
    assert json.loads(err)["position"] == 5


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["check", "nosuch"])
    assert e.value.code == 2


def test_ber_and_symplectic_from_file(capsys, tmp_path):
    ch = Chart(1, 1)
    J = SuperMatrix.block_diag(((ch.poly("2"),),), ((ch.poly("1/2"),),))
    f = tmp_path / "m.txt"
    f.write_text(format_matrix(J))
    assert run(capsys, "ber", str(f))[:2] == (0, "4")
    assert run(capsys, "symplectic?", str(f))[:2] == (0, "true")


def test_sample_is_deterministic(capsys):
    a = run(capsys, "sample", "--seed", "3", "--n", "2", "--theta-budget", "2")
    b = run(capsys, "sample", "--seed", "3", "--n", "2", "--theta-budget", "2")
    assert a == b and a[0] == 0


def test_pullback_from_file(capsys, tmp_path):
    ch = Chart(1, 1)
    p = ch.poly
    F = compose(make_diffeo(ch, [p("2*x1")], [p("1/2*x1")]), make_fiber_shift(ch, p("th1*x1")))
    f = tmp_path / "F.json"
    f.write_text(dump_transformation(F))
    code, out, _ = run(capsys, "pullback", str(f), "dx1", "--kind", "form")
    assert code == 0
    assert out == run(capsys, "pullback", str(f), "dx1", "--kind", "form", "--via-fourier")[1]
    assert run(capsys, "pullback", str(f), "1", "--kind", "volume")[1] != "1"


def test_check_runs_and_reports(capsys):
    code, out, _ = run(capsys, "check", "fourier", "--trials", "3", "--format", "structured")
    data = json.loads(out)
    assert code == 0 and data["status"] == "pass" and data["trials_run"] == 3
