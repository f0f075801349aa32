import json
import subprocess
import sys

import pytest

from abelos.cli import main
from abelos.search import COLUMNS, SCHEMA_LINE, SearchGrid, read_csv, run_search, to_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_examples(capsys):
    code, out, _ = run(capsys, "classify", "--q", "7", "--t1", "0", "--t2", "-7")
    rep = json.loads(out)
    assert code == 0 and rep["npp"] and rep["ell_max"] == 2
    assert list(rep)[:8] == ["q", "t1", "t2", "valid", "simple", "npp", "ell_max", "rule"]
    _, out, _ = run(capsys, "classify", "--weil-restriction", "--q", "16", "--tr-e", "31")
    rep = json.loads(out)
    assert rep["case"] == 1 and rep["ell_max"] == 2 and rep["rule"] == "prop45-case-1"
    _, out, _ = run(capsys, "classify", "--q", "9", "--t1", "0", "--t2", "9")
    rep = json.loads(out)
    assert rep["simple"] == "NotSimple" and rep["ell_max"] == 0


def test_classify_from_genus2_curve(capsys):
    code, out, _ = run(capsys, "classify", "--curve", '{"p":7,"model":"genus2","f":[1,0,0,0,0,1]}')
    rep = json.loads(out)
    assert code == 0 and (rep["q"], rep["t1"], rep["t2"]) == (7, 0, 0)


def test_bound_command(capsys):
    code, out, _ = run(capsys, "bound", "--weil-restriction", "--q", "16", "--tr-e", "31", "--r", "3", "--ell", "2")
    res = json.loads(out)
    assert code == 0
    assert (res["n"], res["k"], res["d_lower"], res["d_general"]) == (226, 9, 144, 4)
    assert [c["exact"] for c in res["candidates"]] == ["3", "84-sqrt(2)", "125-50*sqrt(2)"]
    assert res["relevance_B"] == 24 and res["vacuous"] is False
    _, out, _ = run(capsys, "bound", "--weil-restriction", "--q", "16", "--tr-e", "31", "--r", "3")
    res = json.loads(out)
    assert res["d_lower"] == 145 and res["d_haloui"] == 145
    _, out, _ = run(capsys, "bound", "--weil-restriction", "--q", "16", "--tr-e", "31", "--r", "3", "--e", "2")
    assert json.loads(out)["d_general"] == 79


def test_exit_codes(capsys, tmp_path, monkeypatch):
    code, _, err = run(capsys, "bound", "--q", "16", "--t1", "0", "--t2", "-32", "--r", "3", "--ell", "2")
    assert code == 2 and json.loads(err)["error"] == "UnlicensedEll"
    code, out, _ = run(capsys, "bound", "--q", "16", "--t1", "0", "--t2", "-32", "--r", "3", "--ell", "2", "--unsafe-ell")
    assert code == 0 and "watermark" in json.loads(out)
    code, _, _ = run(capsys, "classify", "--q", "4", "--t1", "9", "--t2", "0")
    assert code == 2
    code, _, _ = run(capsys, "classify", "--q", "12", "--t1", "0", "--t2", "0")
    assert code == 2
    monkeypatch.setenv("ABELOS_MAX_ENUM", "10")
    code, _, err = run(capsys, "lab", "--curve1", '{"p":5,"a":[1,1]}', "--curve2", '{"p":5,"a":[1,1]}', "--exact")
    assert code == 3 and json.loads(err)["error"] == "EnumerationCapExceeded"


def test_count_and_phi_max(capsys):
    _, out, _ = run(capsys, "count", "--curve", '{"p":5,"n":1,"model":"weierstrass","a":[0,0,0,1,1]}')
    rep = json.loads(out)
    assert rep["counts"] == {"1": 9, "2": 27}
    _, out, _ = run(capsys, "phi-max", "--q", "16", "--t1", "0", "--t2", "-31", "--r", "3", "--ell", "2")
    rep = json.loads(out)
    assert rep["value"] == "84-sqrt(2)" and rep["argmax"] == [1, 0] and rep["closed_form_dominates"]


def test_lab_command(capsys, tmp_path):
    dump = tmp_path / "g.txt"
    code, out, _ = run(
        capsys, "lab", "--curve1", '{"p":5,"a":[1,1]}', "--curve2", '{"p":5,"a":[1,1]}', "--exact",
        "--dump-generator", str(dump),
    )
    rep = json.loads(out)
    assert code == 0
    assert (rep["n"], rep["k"], rep["bound_general"], rep["vacuous"]) == (64, 9, -51, True)
    assert rep["d_exact"] == rep["n"] - rep["max_nf"]
    assert rep["checks"] == {"dim": "ok", "nf_cap": "ok", "dist": "vacuous"}
    rows = dump.read_text().split("\n")
    assert len([r for r in rows if r]) == 9 and len(rows[0].split()) == 64


def test_search_output(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--q", "16", "--r", "3")
    lines = out.splitlines()
    assert code == 0 and lines[0] == SCHEMA_LINE and lines[1] == ",".join(COLUMNS)
    rows = read_csv(out)
    hit = [r for r in rows if r["n"] == "226" and r["ell"] == "1"]
    assert hit and int(hit[0]["d_simple"]) >= 145
    assert rows == sorted(rows, key=lambda r: (int(r["q"]), int(r["t1"]), int(r["t2"]), int(r["r"]), int(r["ell"])))
    assert "0000001" not in out and "." not in "".join(lines[2:]).replace("phi(", "")
    # rerun determinism, including through the worker pool
    _, again, _ = run(capsys, "search", "--q", "16", "--r", "3", "--jobs", "2")
    assert again == out


def test_search_empty_trace_list(capsys):
    code, out, _ = run(capsys, "search", "--q", "16", "--traces", "explicit", "--pairs", "")
    assert code == 0 and out.splitlines() == [SCHEMA_LINE, ",".join(COLUMNS)]


def test_search_with_figures(capsys, tmp_path):
    code, _, err = run(capsys, "search", "--q", "16", "--r", "3-4", "--out", str(tmp_path / "s.csv"), "--figures", str(tmp_path))
    assert code == 0
    assert (tmp_path / "s.csv").read_text().startswith(SCHEMA_LINE)
    assert (tmp_path / "search_d_vs_r.png").stat().st_size > 0
    assert (tmp_path / "search_ell_comparison.png").stat().st_size > 0


def test_report_command(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--q", "16", "--r", "3-4", "--outdir", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and rep["rows"] > 0
    for path in rep["figures"] + [rep["csv"]]:
        assert (tmp_path / path.split("/")[-1]).exists()


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "bound", "q": 16, "weil_restriction": True, "tr_e": 31, "r": 3, "ell": 2}))
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0 and json.loads(out)["d_lower"] == 144
    code, out, _ = run(capsys, "--config", str(cfg), "bound", "--ell", "1")
    assert json.loads(out)["d_lower"] == 145


def test_search_grid_policies():
    grid = SearchGrid(qs=[16], trace_source="explicit", explicit=[(0, -32)], rs=[3], ells=[1, 2], unsafe=True)
    rows = run_search(grid)
    assert all(r["winner"].endswith("[unsafe]") for r in rows if r["d_simple"] != "" and r["ell"] == 2)
    grid.unsafe = False
    rows = run_search(grid)
    assert all(r["d_simple"] == "" for r in rows if r["ell"] == 2)
    assert to_csv(rows).count("\n# n=") == 1


def test_verify_fast_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "fast", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and len(rep["checks"]) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "abelos", "classify", "--q", "7", "--t1", "0", "--t2", "-7"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["ell_max"] == 2
