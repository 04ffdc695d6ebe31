import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fbmorse import __version__
from fbmorse.cli import grid_points, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_equator(capsys):
    code, out, err = run(capsys, "spectrum", "--model", '{"kind":"Equator","n":3}', "--no-timestamp")
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == __version__ and doc["config"]["seed"] == 42
    assert doc["result"]["lambda1"] == -3.0
    assert doc["result"]["strong"]["strong_index"] == 1
    assert "exact_below" in doc["result"]["spectrum"]
    assert "MI = 1" in err


def test_spectrum_cap(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", '{"kind":"UmbilicalCap","n":2,"r":0.5}', "--no-timestamp")
    assert code == 0 and json.loads(out)["result"]["lambda1"] == pytest.approx(-8.0, rel=1e-15)


@pytest.mark.parametrize("bad", ['{"kind":"Equator"', '{"kind":"Torus","n":2}', "[1,2]", '{"kind":"Equator","n":1}'])
def test_spectrum_invalid_model(capsys, bad):
    code, out, err = run(capsys, "spectrum", "--model", bad)
    assert code == 2 and out == "" and err.startswith("error:")


def test_spectrum_lmax_and_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "spectrum", "--model", '{"kind":"Equator","n":2}', "--lmax", "3",
                       "--format", "csv", "--out", str(path))
    assert code == 0 and "lambda1 = -2" in out
    lines = path.read_text().splitlines()
    assert lines[0] == f"# fbmorse {__version__}"
    assert json.loads(lines[1][len("# config "):])["lmax"] == 3
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[2:]))))
    assert [(float(r["value"]), int(r["multiplicity"])) for r in rows] == [(-2.0, 1), (0.0, 2), (4.0, 3), (10.0, 4)]


def test_identical_config_identical_bytes(capsys, tmp_path):
    outs = []
    for _ in range(2):
        p = tmp_path / "a.json"
        run(capsys, "index-scan", "--n", "2", "--k", "1", "--grid", "0.3:0.9:0.01", "--no-timestamp", "--out", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    code, out, _ = run(capsys, "index-scan", "--n", "2", "--k", "1", "--grid", "0.3:0.9:0.01")
    assert "timestamp" in json.loads(out)


def test_index_scan_window(capsys):
    code, out, err = run(capsys, "index-scan", "--n", "2", "--k", "1", "--grid", "0.30:0.95:0.001", "--no-timestamp")
    assert code == 0
    w = json.loads(out)["result"]["window"]
    assert w["empirical"][0] == pytest.approx(0.5, abs=1e-3)
    assert w["empirical"][1] == pytest.approx(math.sqrt(0.75), abs=1e-3)
    assert w["max_endpoint_deviation"] <= 1e-3


def test_index_scan_n4_k3(capsys):
    code, out, _ = run(capsys, "index-scan", "--n", "4", "--k", "3", "--grid", "0.30:0.95:0.001", "--no-timestamp")
    w = json.loads(out)["result"]["window"]
    assert w["analytic"] == pytest.approx([math.sqrt(3 / 6), math.sqrt(5 / 6)])
    assert w["max_endpoint_deviation"] <= 1e-3


@pytest.mark.parametrize("grid", ["0.5:0.5:0.1", "0.9:0.3:0.01", "0.3:0.9:0", "0.3:0.9", "a:b:c", "0.0:0.5:0.1", "0.3:1.0:0.1"])
def test_index_scan_bad_range(capsys, grid):
    code, _, err = run(capsys, "index-scan", "--n", "2", "--k", "1", "--grid", grid)
    assert code == 2 and "error" in err


def test_grid_points_are_clean():
    pts = grid_points(0.3, 0.95, 0.001)
    assert len(pts) == 651 and pts[-1] == 0.95 and pts[150] == 0.45


def test_verify_alencar(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "alencar", "--samples", "1000", "--n", "4", "--no-timestamp")
    assert code == 0
    reps = json.loads(out)["result"]
    assert len(reps) == 1 and reps[0]["pass"]


def test_verify_bounds_htorus(capsys):
    code, out, err = run(capsys, "verify", "--suite", "bounds", "--family", "htorus", "--n", "3", "--no-timestamp")
    assert code == 0
    reps = json.loads(out)["result"]
    assert {r["family_params"]["k"] for r in reps if r["equality"]} == {2}
    assert "k=1" not in err.split("equality")[1]


def test_verify_bad_suite_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "nope"])
    assert info.value.code == 2


def test_fem_exit_codes(capsys):
    code, _, err = run(capsys, "fem", "--model", '{"kind":"Equator","n":3}')
    assert code == 2 and "n = 2" in err
    code, _, _ = run(capsys, "fem", "--model", '{"kind":"Equator","n":2}', "--refine", "9")
    assert code == 2


def test_fem_gap_exit(capsys):
    code, _, err = run(capsys, "fem", "--model", '{"kind":"HTorusHalf","n":2,"k":1,"r":0.51}', "--refine", "3")
    assert code == 1 and "GapTooSmall" in err


def test_fem_equator(capsys, tmp_path):
    prefix = tmp_path / "eq"
    code, out, _ = run(capsys, "fem", "--model", '{"kind":"Equator","n":2}', "--refine", "4", "--no-timestamp",
                       "--dump-matrices", str(prefix), "--mesh-out", str(tmp_path / "eq.off"))
    assert code == 0
    doc = json.loads(out)
    comp = doc["result"]["comparison"]
    assert comp["strong_agree"] and comp["fem_strong"] == 1
    assert (tmp_path / "eq_K.mtx").exists() and (tmp_path / "eq.off").exists()
    assert doc["config"]["extras"]["dump_matrices"] == str(prefix)


def test_report(capsys):
    code, out, err = run(capsys, "report", "--n", "3", "--no-timestamp")
    assert code == 0
    res = json.loads(out)["result"]
    labels = res["discrepancies"]
    assert any(lab.startswith("MinimalCliffordHalf") for lab in labels)
    assert not any(lab.startswith("Equator") for lab in labels)


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "fbmorse.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
