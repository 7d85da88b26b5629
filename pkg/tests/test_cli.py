import csv
import io
import json
import subprocess
import sys

import pytest

from kmcf.charring import FormalSum
from kmcf.cli import main, parse_vector
from kmcf.errors import ParseError
from kmcf.series import IntLaurent
from kmcf.rootsys import RootSystem, vectors_up_to_height


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_vector():
    assert parse_vector("-2,-2") == (-2, -2)
    assert parse_vector("(3, 4)") == (3, 4)
    with pytest.raises(ParseError):
        parse_vector("a,b")


def test_h_text(capsys):
    code, out, _ = run(capsys, "h", "--mu", "2,2")
    assert code == 0 and out.strip() == "-q+2*q^2-q^3"
    code, out, _ = run(capsys, "h", "--mu", "8,22")
    assert out.strip() == "q^2-3*q^3+2*q^4"


def test_h_rejects_vector_outside_positive_cone(capsys):
    code, _, err = run(capsys, "h", "--mu", "-1,2")
    assert code == 2 and "error" in err


def test_dlambda_negative_vector_is_glued(capsys):
    code, out, _ = run(capsys, "dlambda", "--lambda", "-2,-2", "--exact")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "q-2*q^2+q^3"
    assert lines[1].startswith("series: q-2*q^2+q^3")
    assert lines[-1] == "AGREE"


def test_dlambda_json(capsys):
    code, out, _ = run(capsys, "dlambda", "--lambda", "-3,-4", "--exact", "--format", "json")
    data = json.loads(out)
    assert data["verdict"] == "AGREE"
    assert data["exact"] == [0, 0, -2, 2]
    assert data["series"][:4] == [0, 0, -2, 2]


def test_dlambda_strict_vs_explore(capsys):
    code, _, err = run(capsys, "dlambda", "--lambda", "-1,0")
    assert code == 2 and "not in" in err
    code, out, _ = run(capsys, "dlambda", "--lambda", "-1,0", "--mode", "explore")
    assert code == 0 and out.startswith("series:")


def test_roots_formats(capsys):
    code, out, _ = run(capsys, "roots", "--max-height", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {r["root"] for r in rows} == {"(1,0)", "(0,1)", "(1,1)", "(1,2)", "(2,1)"}
    assert all(r["multiplicity"] == "1" for r in rows)
    _, out, _ = run(capsys, "roots", "--max-height", "3", "--format", "json")
    assert len(json.loads(out)) == 5
    _, out, _ = run(capsys, "roots", "--max-height", "3", "--format", "latex")
    assert out.startswith("\\begin{tabular}")
    _, out, _ = run(capsys, "roots", "--max-height", "3")
    assert "imaginary" in out


def test_correction_json_round_trip(capsys):
    code, out, _ = run(capsys, "correction", "--max-height", "4", "--qdeg", "4", "--format", "json")
    data = json.loads(out)
    M = FormalSum.from_json(data["M"])
    assert code == 0
    assert M.constant_term() == IntLaurent.from_list([1, 2, 2, 2, 2])
    assert [d["lambda"] for d in data["d"]] == [[0, 0], [-1, -1], [-2, -2]]
    assert data["d"][2]["coeff"] == [0, 1, -2, 1, 0]
    assert json.loads(M.dumps()) == data["M"]


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--lambda", "-3,-4", "--max-len", "2")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[1].split() == ["e", "(3,4)", "-4", "8", "-5", "1"]


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--profile", "finite-A2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    code, _, _ = run(capsys, "verify", "--profile", "bogus")
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "h")[0] == 2
    assert run(capsys, "h", "--mu", "1,1", "--max-height", "0")[0] == 2
    assert run(capsys, "h", "--mu", "1,1", "--preset", "h3", "--gcm", "x.json")[0] == 2


def test_gcm_file_with_multiplicities(tmp_path, capsys):
    path = tmp_path / "gcm.json"
    ref = RootSystem.preset("h3")
    entries = [{"root": list(b), "m": ref.multiplicity(b)} for b in vectors_up_to_height(2, 4, include_zero=False)]
    path.write_text(json.dumps({"matrix": [[2, -3], [-3, 2]], "multiplicities": entries}))
    code, out, _ = run(capsys, "h", "--gcm", str(path), "--mu", "2,2")
    assert code == 0 and out.strip() == "-q+2*q^2-q^3"
    # unlisted imaginary vectors count as multiplicity 0
    path.write_text(json.dumps({"matrix": [[2, -3], [-3, 2]], "multiplicities": [{"root": [1, 1], "m": 1}]}))
    code, out, _ = run(capsys, "h", "--gcm", str(path), "--mu", "2,2")
    assert out.strip() == "-q^3"
    bad = tmp_path / "bad.json"
    bad.write_text("[[2, -1], [0, 2]]")
    assert run(capsys, "roots", "--gcm", str(bad))[0] == 2
    assert run(capsys, "roots", "--gcm", str(tmp_path / "missing.json"))[0] == 2


def test_wrong_multiplicity_is_a_consistency_error(tmp_path, capsys):
    path = tmp_path / "gcm.json"
    path.write_text(json.dumps({"matrix": [[2, -3], [-3, 2]], "multiplicities": [{"root": [1, 1], "m": 3}]}))
    code, _, err = run(capsys, "correction", "--gcm", str(path), "--max-height", "4", "--qdeg", "3")
    assert code == 3 and "outside" in err


def test_cache_dir_is_populated(tmp_path, capsys):
    code, _, _ = run(capsys, "roots", "--max-height", "6", "--cache-dir", str(tmp_path))
    assert code == 0
    assert list(tmp_path.glob("*_h*.json"))
    code, out, _ = run(capsys, "h", "--mu", "3,3", "--cache-dir", str(tmp_path))
    assert out.strip() == "-3*q+6*q^2-3*q^3"


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "kmcf", "correction", "--max-height", "5", "--qdeg", "5", "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
