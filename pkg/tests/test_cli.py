import json
import subprocess
import sys

import pytest

from cebotarev.cli import execute, main


@pytest.fixture
def heis(tmp_path):
    (tmp_path / "heis.json").write_text(json.dumps({"builtin": "heisenberg:3"}))
    ctx = tmp_path / "heis3.json"
    ctx.write_text(json.dumps({"group": "heis.json", "fields": {"L": [0, 3, 10]}}))
    return str(ctx)


def run(*argv):
    res = execute(list(argv))
    return res.status, res.payload


def test_frobenius_inert_at_two():
    status, out = run("frobenius", "2", "--quad", "5")
    assert status == 0 and out["symbol"] == "inert"


def test_frobenius_cyclotomic_and_bad_prime():
    assert run("frobenius", "3", "--conductor", "12")[1]["ramified"] is True
    status, out = run("frobenius", "9", "--quad", "5")
    assert status == 2 and out["error"]["kind"] == "input"


def test_cset_density(heis):
    status, out = run("cset", "density", "--context", heis, "--level", "N", "--class-of", "rho")
    assert status == 0 and out["density"] == "1/27"


def test_cset_pairwise(heis):
    status, out = run("cset", "almost-subset", "--context", heis, "--level", "N", "--class-of", "sigma",
                      "--other-level", "L", "--other-class-of", "sigma")
    assert status == 0 and out["almost_equal"] and out["oracle"]
    status, out = run("cset", "intersect", "--context", heis, "--level", "L", "--class-of", "sigma")
    assert status == 2


def test_group_command():
    status, out = run("group", "--builtin", "symmetric:3", "--sylow", "3", "--centralizer", "t")
    assert status == 0 and out["class_sizes"] == [1, 2, 3] and out["sylow"]["cyclic"]


def test_sieve_command_echoes_bound():
    status, out = run("sieve", "--pred", "cyclo(4)=3", "--bound", "50", "--limit", "3")
    assert out["bound"] == 50 and out["members"] == [3, 7, 11] and out["truncated"]
    assert out["count"] == 8


def test_topology_commands(tmp_path):
    s = json.dumps({"clauses": [[{"quad": -1, "sign": -1}, {"quad": 5, "sign": -1}]]})
    status, out = run("topology", "closure", "--set", s)
    assert status == 0 and out["closure_witness"] == 2
    f = tmp_path / "s.json"
    f.write_text(s)
    assert run("topology", "member", "3", "--set", str(f))[1]["member"] is True
    status, out = run("topology", "separate", "7", "2")
    assert status == 0 and out["certificates"]["disjoint"]
    status, out = run("topology", "refine", json.dumps({"clauses": [[{"quad": -3, "sign": 1}]]}))
    assert status == 2 and "witness" in out["error"]["message"]


def test_metric_delta_compat_trace():
    status, out = run("metric", "delta", "5", "11", "--compat")
    assert status == 0
    assert out["delta_literal"] == "1/3" and out["printed_value"] == "1/3"
    assert [t["d"] for t in out["trace"]] == [1, 2, 3, 4]
    assert out["config"]["d_max"] == 4 and out["config"]["sieve_bound"] == 100000


def test_metric_matrix_csv(tmp_path):
    path = tmp_path / "m.csv"
    status, out = run("metric", "matrix", "--primes", "2,3,5,7", "--csv", str(path), "--dmax", "8")
    assert status == 0 and out["symmetric"] and not out["ultrametric_violations"]
    rows = path.read_text().splitlines()
    assert rows[0] == ",2,3,5,7" and rows[1].split(",")[1] == "0"


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d_max": 6, "sieve_bound": 5000}))
    out = run("--config", str(cfg), "metric", "delta", "3", "5")[1]
    assert out["config"]["d_max"] == 6 and out["config"]["sieve_bound"] == 5000
    out = run("--config", str(cfg), "metric", "delta", "3", "5", "--dmax", "9")[1]
    assert out["config"]["d_max"] == 9
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run("--config", str(cfg), "metric", "delta", "3", "5")[0] == 2


def test_reports(tmp_path):
    path = tmp_path / "r.json"
    status, out = run("report", "compat-comparison", "--out", str(path))
    assert status == 0 and len(out["pairs"]) == 28 and out["schema_version"] == 1
    assert json.loads(path.read_text()) == out
    empty = run("report", "compat-comparison", "--prime-bound", "1")[1]
    assert empty["pairs"] == [] and empty["schema"] == "compat-comparison/1"
    disc = run("report", "discrepancy")[1]
    assert all(not r["agrees"] for r in disc["pairs"])
    audit = run("report", "density-audit", "--radicands", "-3", "-1", "--bound", "100000")[1]
    assert len(audit["rows"]) == 4
    assert all(abs(r["empirical"] - 0.25) < 0.01 for r in audit["rows"])


def test_errors_are_structured(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    for argv in (["bogus"], ["cset", "density", "--context", str(bad), "--level", "N", "--element", "0"],
                 ["cset", "density", "--context", "missing.json", "--level", "N", "--element", "0"],
                 ["sieve", "--pred", "quad(2)=7", "--bound", "10"]):
        status, out = run(*argv)
        assert status == 2 and set(out["error"]) == {"kind", "type", "message"}


def test_search_exhaustion_exit_code():
    status, out = run("topology", "separate", "97", "89", "--bound", "5")
    assert status == 3 and out["error"]["kind"] == "search-exhausted"


def test_determinism():
    a = execute(["metric", "partition", "5"])
    b = execute(["metric", "partition", "5"])
    assert a.dumps() == b.dumps() and a.status == 0


def test_main_prints_json(capsys):
    assert main(["frobenius", "2", "--quad", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["symbol"] == "inert"


@pytest.mark.parametrize("module", ["cebotarev", "cebotarev.cli"])
def test_console_entry_point(module):
    proc = subprocess.run([sys.executable, "-m", module, "frobenius", "7", "--quad", "-3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["symbol"] == "split"
