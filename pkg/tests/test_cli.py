import csv
import io
import json

import pytest

from fracmoser import cli
from fracmoser.errors import SolverError
from fracmoser.mt_functionals import SWEEP_FIELDS


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_constants():
    code, out, _ = run(["constants", "--n", "2", "--p", "2"])
    assert code == 0
    table = json.loads(out)
    assert repr(table["alpha_np"]) == "12.566370614359172"
    assert '"alpha_np": 12.566370614359172' in out


def test_validate_passes():
    code, out, _ = run(["validate"])
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_validate_failure_exits_one(monkeypatch):
    monkeypatch.setattr(cli, "validation_checks", lambda: [("broken", False, 1.0)])
    code, out, err = run(["validate"])
    assert code == 1 and json.loads(err)["error"] == "FracMoserError"


def test_sharpness_csv_is_deterministic():
    argv = ["sharpness", "--n", "1", "--p", "2", "--kmin", "3", "--kmax", "5", "--weight", "t^2"]
    code, a, _ = run(argv)
    _, b, _ = run(argv)
    assert code == 0 and a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert tuple(rows[0]) == SWEEP_FIELDS and len(rows) == 4
    weighted = [float(r[-1]) for r in rows[1:]]
    assert all(y > x for x, y in zip(weighted, weighted[1:]))
    # 17 significant digits
    assert all(len(r[1].replace(".", "").replace("-", "").split("e")[0].lstrip("0")) >= 15 for r in rows[1:])


def test_sharpness_json():
    code, out, _ = run(["sharpness", "--n", "1", "--p", "2", "--kmin", "3", "--kmax", "3", "--json"])
    assert code == 0 and json.loads(out)["rows"][0]["k"] == 3


def test_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 3, "p": 1.5}))
    code, out, _ = run(["constants", "--config", str(cfg), "--n", "2"])
    table = json.loads(out)
    assert code == 0 and table["n"] == 2 and table["p"] == 1.5


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 2, "colour": "red"}))
    code, _, err = run(["constants", "--config", str(cfg)])
    assert code == 2 and "colour" in err


def test_usage_errors():
    assert run(["nonsense"])[0] == 2
    assert run([])[0] == 2
    assert run(["solve", "--dim", "3"])[0] == 2
    assert run(["moser", "--eps", "0.4"])[0] == 2


def test_moser_csv():
    code, out, _ = run(["moser", "--n", "2", "--p", "2", "--eps", "0.01", "--samples", "20"])
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["r", "u_eps", "v_eps", "f_eps", "g_eps", "R_eps"]
    assert all(float(x) < float("inf") for r in rows[1:] for x in r)


def test_fraclap_csv():
    code, out, _ = run(["fraclap", "--profile", "log", "--n", "2", "--sigma", "0.5", "--at", "0.5,1,2"])
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and [float(r[1]) for r in rows[1:]] == pytest.approx([2.0, 1.0, 0.5], rel=1e-6)


def test_solve(tmp_path):
    prof = tmp_path / "u.csv"
    code, out, _ = run(["solve", "--dim", "2", "--h", "0.0625", "--lambda-frac", "0.5", "--b", "1",
                        "--profile-csv", str(prof)])
    report = json.loads(out)
    assert code == 0 and report["converged"] and report["J"] < report["level_bound"]
    assert len(prof.read_text().splitlines()) == 16


def test_numeric_failure(monkeypatch):
    def boom(*a, **k):
        raise SolverError("did not converge")
    monkeypatch.setattr(cli, "minimize_on_S", boom)
    code, _, err = run(["solve", "--dim", "1", "--h", "0.0625"])
    assert code == 1 and json.loads(err) == {"command": "solve", "error": "SolverError", "message": "did not converge"}


def test_output_file(tmp_path):
    target = tmp_path / "t.json"
    assert run(["constants", "--n", "1", "--p", "2", "-o", str(target)])[0] == 0
    assert json.loads(target.read_text())["alpha_np"] == pytest.approx(3.141592653589793)
