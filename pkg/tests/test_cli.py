"""
End-to-end tests for the tetrad command line
"""
import io
import json

import pandas as pd
import pytest

from cli.commands import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from cli.records import load_record


# ===== FIXTURES =====

@pytest.fixture
def record_file(tmp_path, capsys):
    path = tmp_path / "concave.json"
    assert main(["solve", "--areas=5,6,4,-8", "--out", str(path)]) == EXIT_OK
    capsys.readouterr()
    return path


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ===== SOLVE =====

def test_solve_json_record(capsys):
    code, out, err = run(capsys, ["solve", "--areas=1,1,1,-1", "--json"])
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["schema_version"] == "1.0"
    assert record["inputs"]["areas"] == [1.0, 1.0, 1.0, -1.0]
    assert record["outputs"]["lambda"] < 0
    assert set(record["outputs"]["distances"]) == {"r12", "r13", "r14", "r23", "r24", "r34"}
    assert "equilateral_center" in record["outputs"]["classification"]["symmetries"]
    assert record["provenance"]["tool"] == "tetrad"
    assert "✅" in err


def test_solve_table(capsys):
    code, out, _ = run(capsys, ["solve", "--areas=15,-6,3,-4"])
    assert code == EXIT_OK
    assert "Hull:           convex" in out
    assert "central_eq" in out


def test_solve_file_round_trip(record_file, capsys):
    record = load_record(record_file)
    code, out, _ = run(capsys, ["solve", "--areas=5,6,4,-8", "--json"])
    assert code == EXIT_OK
    fresh = json.loads(out)
    assert record.outputs.lam == fresh["outputs"]["lambda"]
    assert record.outputs.masses == fresh["outputs"]["masses"]


def test_solve_invalid_areas(capsys):
    code, out, _ = run(capsys, ["solve", "--areas=1,1,1,1"])
    assert code == EXIT_FAILURE
    assert json.loads(out)["error"] == "AllSameSign"


def test_solve_below_euler_bound(capsys):
    code, out, _ = run(capsys, ["solve", "--areas=1,0.05,1,-1"])
    assert code == EXIT_FAILURE
    assert json.loads(out)["error"] in ("NoRoot", "NonPhysicalRoot")


@pytest.mark.parametrize("argv", [
    ["solve", "--areas=1,2,3"],
    ["solve", "--areas=1,x,3,-4"],
    ["solve"],
    [],
    ["solve", "--areas=1,1,1,-1", "--residual", "bogus"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, argv)
    assert code == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    code, out, _ = run(capsys, ["--help"])
    assert code == EXIT_OK
    assert "solve" in out


# ===== CLASSIFY =====

def test_classify_square(capsys):
    code, out, _ = run(capsys, ["classify", "--areas=1,-1,1,-1", "--json"])
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["hull"] == "convex"
    assert "square" in result["symmetries"]


# ===== VERIFY =====

def test_verify_passes(record_file, capsys):
    code, out, _ = run(capsys, ["verify", str(record_file)])
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["passes"]
    assert result["distance_mismatch"] <= 1e-12


def test_verify_detects_corrupted_distance(record_file, capsys):
    data = json.loads(record_file.read_text())
    data["outputs"]["distances"]["r12"] *= 1.01
    record_file.write_text(json.dumps(data))

    code, out, _ = run(capsys, ["verify", str(record_file)])
    assert code == EXIT_FAILURE
    result = json.loads(out)
    assert not result["passes"]
    assert "distance_mismatch" in result["failed"]


def test_verify_missing_file(tmp_path, capsys):
    code, out, _ = run(capsys, ["verify", str(tmp_path / "absent.json")])
    assert code == EXIT_USAGE
    assert json.loads(out)["error"] == "UsageError"


def test_verify_malformed_record(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": "1.0", "inputs": {}}')
    code, _, _ = run(capsys, ["verify", str(path)])
    assert code == EXIT_USAGE


# ===== LIMIT =====

def test_limit_maxwell_both_roots(capsys):
    code, out, _ = run(capsys, ["limit", "maxwell", "--json"])
    assert code == EXIT_OK
    records = json.loads(out)
    assert len(records) == 2
    assert records[0]["aux"]["theta_maxwell"] == pytest.approx(0.826602936080376, abs=1e-12)
    assert records[1]["aux"]["theta_maxwell"] == pytest.approx(2.4219145305912, abs=1e-11)


def test_limit_euler_convex(capsys):
    code, out, _ = run(capsys, ["limit", "euler-convex", "--a1", "1", "--a4=-1e9", "--json"])
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["kind"] == "euler_convex"
    assert record["aux"]["x"] == pytest.approx(0.077085817, abs=1e-6)


def test_limit_text_output(capsys):
    code, out, _ = run(capsys, ["limit", "coorbital", "--a1", "1", "--a2", "1"])
    assert code == EXIT_OK
    assert "Limit:             coorbital" in out
    assert "theta" in out


def test_limit_general_lagrange(capsys):
    code, out, _ = run(capsys, ["limit", "general-lagrange", "--values", "1,1,1", "--which", "4",
                                "--sign=-1", "--json"])
    assert code == EXIT_OK
    assert json.loads(out)["lambda_or_product"] == pytest.approx(3.0 * 3.0 ** 0.5 - 1.0, rel=1e-9)


def test_limit_missing_parameter(capsys):
    code, out, _ = run(capsys, ["limit", "coorbital", "--a1", "1"])
    assert code == EXIT_USAGE
    assert "--a2" in json.loads(out)["message"]


def test_limit_without_root(capsys):
    code, out, _ = run(capsys, ["limit", "coorbital", "--a1", "1", "--a2", "0.5"])
    assert code == EXIT_FAILURE
    assert json.loads(out)["error"] == "NoRoot"


# ===== ORBIT =====

def test_orbit_csv(capsys):
    code, out, _ = run(capsys, ["orbit", "--areas=5,6,4,-8", "--ecc", "0.72", "--samples", "36"])
    assert code == EXIT_OK
    assert out.startswith("# areas: ")
    assert "# eccentricity: 0.71999999999999997" in out
    frame = pd.read_csv(io.StringIO(out), comment="#")
    assert list(frame.columns) == ["t", "x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"]
    assert len(frame) == 36


def test_orbit_mirror_to_file(tmp_path, capsys):
    path = tmp_path / "orbit.csv"
    code, out, _ = run(capsys, ["orbit", "--areas=15,-6,3,-4", "--ecc", "0.5", "--samples", "8",
                                "--mirror", "--out", str(path)])
    assert code == EXIT_OK
    assert out == ""
    assert "# arrangement: mirror" in path.read_text()


def test_orbit_bad_eccentricity(capsys):
    code, _, _ = run(capsys, ["orbit", "--areas=5,6,4,-8", "--ecc", "1.5"])
    assert code == EXIT_USAGE


# ===== SWEEP =====

def test_sweep_toward_euler_bound(capsys):
    code, out, err = run(capsys, ["sweep", "--vary", "a2", "--fixed=1,1,-1", "--start", "1",
                                  "--stop", "0.05", "--step=-0.05", "--quiet"])
    assert code == EXIT_OK
    frame = pd.read_csv(io.StringIO(out), comment="#")
    assert len(frame) == 20
    assert frame["status"].iloc[0] == "OK"
    assert frame["status"].iloc[-1] != "OK"
    assert frame["message"].iloc[-1] in ("NoRoot", "NonPhysicalRoot")
    assert "grid points solved" in err


def test_sweep_log_grid_to_file(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, ["sweep", "--vary", "a4", "--fixed", "1,1,1", "--start=-1", "--stop=-0.01",
                              "--log", "--num", "5", "--quiet", "--out", str(path)])
    assert code == EXIT_OK
    text = path.read_text()
    assert "# grid: log" in text
    frame = pd.read_csv(io.StringIO(text), comment="#")
    assert (frame["status"] == "OK").all()


def test_sweep_needs_step(capsys):
    code, _, _ = run(capsys, ["sweep", "--vary", "a2", "--fixed=1,1,-1", "--start", "1", "--stop", "0.5",
                              "--quiet"])
    assert code == EXIT_USAGE


def test_orbit_both_arrangements(capsys):
    code, out, _ = run(capsys, ["orbit", "--areas=5,6,4,-8", "--ecc", "0.3", "--samples", "6", "--both"])
    assert code == EXIT_OK
    assert "# arrangement: direct,mirror" in out
    frame = pd.read_csv(io.StringIO(out), comment="#")
    assert frame.columns[0] == "arrangement"
    assert frame["arrangement"].value_counts().to_dict() == {"direct": 6, "mirror": 6}


def test_orbit_mirror_and_both_conflict(capsys):
    code, _, _ = run(capsys, ["orbit", "--areas=5,6,4,-8", "--mirror", "--both"])
    assert code == EXIT_USAGE
