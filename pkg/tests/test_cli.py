import json
import subprocess
import sys

import pytest

from statsub.cli import main
from statsub.report import render_report
from statsub.runner import configure, run_suites


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_passing_run_text(capsys):
    code, out, _ = run(capsys, "check", "example1", "--suites", "statistical,holomorphic", "--points", "20")
    assert code == 0
    rows = [line for line in out.splitlines() if line.rstrip().endswith("PASS") or "  PASS  " in line]
    assert len(rows) == 21
    assert "FAIL" not in out
    assert out.rstrip().splitlines()[-1] == "all 21 identities pass"


def test_failing_run(capsys):
    code, out, _ = run(capsys, "check", "perturbed_example1", "--suites", "statistical", "--points", "10")
    assert code == 1
    fails = [line for line in out.splitlines() if " FAIL" in line]
    assert any("Codazzi" in line for line in fails)
    assert "identities fail" in out.splitlines()[-1]


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "no_such_file.json"],
        ["check", "example1", "--suites", "bogus"],
        ["check", "example1", "--points", "0"],
        ["check", "example1", "--box", "1,-1"],
        ["check", "example1", "--seed", "xyz"],
        ["check", "example1", "--point", "0,0"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_bad_manifest_reports_path(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"dim": 2, "metric": [[1, 1, "1"], [2, 2, "exp(x1 -"]]}))
    code, _, err = run(capsys, "check", str(p))
    assert code == 2
    assert "metric[1][2]" in err and "offset 8" in err


def test_json_is_byte_identical_and_round_trips(capsys):
    argv = ("check", "example2", "--points", "10", "--format", "json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    doc = json.loads(a)
    assert doc["exit_status"] == 0
    assert doc["classification"]["anti_invariant"] is True
    assert set(doc["suites"]) == {
        "classify", "holomorphic", "k_identities", "section4", "space_form", "statistical", "submersion", "theorem_f",
    }
    assert doc["summary"].startswith("all ")


def test_seed_precedence(capsys, monkeypatch):
    base = ("check", "example1", "--suites", "statistical", "--points", "3", "--format", "json")
    monkeypatch.setenv("STATSUB_SEED", "beef")
    _, env_run, _ = run(capsys, *base)
    assert json.loads(env_run)["sample"]["seed"] == "0xbeef"
    _, flag_run, _ = run(capsys, *base, "--seed", "0x10")
    assert json.loads(flag_run)["sample"]["seed"] == "0x10"
    monkeypatch.delenv("STATSUB_SEED")
    _, default_run, _ = run(capsys, *base)
    assert json.loads(default_run)["sample"]["seed"] == "0x5745"
    monkeypatch.setenv("STATSUB_SEED", "nothex")
    code, _, err = run(capsys, *base)
    assert code == 2 and "STATSUB_SEED" in err


def test_preconditions_become_skips(capsys):
    code, out, _ = run(capsys, "check", "example1", "--suites", "submersion,classify", "--points", "3")
    assert code == 0
    assert out.count("skipped: no submersion in manifest") == 2


def test_flat_space_form(capsys):
    code, out, _ = run(capsys, "check", "flat_product", "--suites", "space_form", "--points", "5")
    assert code == 0
    assert "space form" in out and "FAIL" not in out


def test_single_point_prints_raw(capsys):
    code, out, _ = run(capsys, "check", "example2", "--suites", "statistical", "--point", "0,0,0,0", "--format", "json")
    assert code == 0
    raw = json.loads(out)["raw"]
    assert raw["point"] == [0, 0, 0, 0]
    assert raw["T"][2][2] == [0, 1, 0, 0]
    assert {"g", "Gamma", "Gamma_star", "R", "J", "H", "P", "Fo", "t", "f"} <= set(raw)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "statsub", "check", "example1", "--suites", "statistical", "--points", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "all 13 identities pass" in proc.stdout


def test_report_counts_skips(ex1):
    m, s = configure(ex1, points=3)
    text = render_report(run_suites(m, ["statistical", "theorem_f"], s), "text")
    assert text.rstrip().endswith("all 13 identities pass (1 skipped)")
