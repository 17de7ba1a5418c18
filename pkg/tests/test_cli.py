from __future__ import annotations

import argparse
import csv
import io
import json
import subprocess
import sys
import time

import pytest

from anglat import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------- parsing

@pytest.mark.parametrize("text,value", [
    ("2", 2), ("0.5+14.1347i", 0.5 + 14.1347j), ("-1-2.5i", -1 - 2.5j), ("3i", 3j), ("-i", -1j), ("-2.5e1i", -25j),
    ("1e-3+2E1i", 0.001 + 20j), ("0.5-i", 0.5 - 1j), (".5+i", 0.5 + 1j),
])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+2j", "2 3i", "1+2i+3"])
def test_parse_complex_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_complex(text)


def test_parse_range():
    assert cli.parse_range("-4.5:11.5") == (-4.5, 11.5)
    for bad in ("3:1", "1", "a:b"):
        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_range(bad)


# ---------------------------------------------------------------- commands

def test_eval_c01(capsys):
    code, out, _ = run(capsys, "eval", "--family", "c01", "--s", "2")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"][0] - 6.026812) < 1e-6 and abs(payload["value"][1]) < 1e-15
    assert payload["error"] < 1e-10 and payload["p_used"] >= 1


def test_eval_other_families(capsys):
    code, out, _ = run(capsys, "eval", "--family", "c14", "--m", "1", "--s", "3")
    assert code == 0 and json.loads(out)["m"] == 1
    code, out, _ = run(capsys, "eval", "--family", "zeta", "--s", "2")
    assert abs(json.loads(out)["value"][0] - 1.6449340668482264) < 1e-14
    code, out, _ = run(capsys, "eval", "--family", "c2n1", "--n", "1", "--s", "2")
    assert abs(json.loads(out)["value"][0] - 3.01340601984597) < 1e-12


def test_delta3_command(capsys):
    code, out, _ = run(capsys, "delta3", "--m", "1", "--s", "0.3+7i", "--parts", "--residual", "--scaled")
    assert code == 0
    payload = json.loads(out)
    assert payload["functional_residual"] < 1e-8
    c = complex(*payload["C_tilde"])
    s = complex(*payload["S_tilde"])
    v = complex(*payload["value"])
    assert abs(c * c - s * s - v) < 1e-10 * abs(v)


def test_negative_arguments_pass_through(capsys):
    code, out, _ = run(capsys, "eval", "--family", "zeta", "--s", "-1+0i")
    assert code == 0 and abs(json.loads(out)["value"][0] + 1 / 12) < 1e-14


def test_zeros_csv_and_json(capsys, tmp_path):
    path = tmp_path / "z.csv"
    code, _, _ = run(capsys, "zeros", "--family", "zeta", "--tmax", "30", "--out", str(path))
    assert code == 0
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["family"] for r in rows] == ["zeta"] * 3
    assert abs(float(rows[0]["t"]) - 14.134725141734694) < 1e-8
    code, out, _ = run(capsys, "zeros", "--family", "c14", "--tmax", "20", "--format", "json")
    recs = json.loads(out)
    assert code == 0 and recs[-1]["family"] == "c14" and abs(recs[-1]["t"] - 19.805994) < 1e-5


def test_contours_command(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "contours", "--sigma", "0.1:0.9", "--t", "18:22", "--nx", "16", "--nt", "24",
                     "--out", str(path))
    assert code == 0
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert {p["field"] for p in payload} == {"ReDelta3", "ImDelta3"}
    code, out, _ = run(capsys, "contours", "--sigma", "4:7", "--t", "0.5:6", "--nx", "16", "--nt", "16",
                       "--field", "prefactor")
    assert code == 0 and {p["field"] for p in json.loads(out)} == {"PrefactorRe", "PrefactorIm"}


# ---------------------------------------------------------------- exit codes

def test_usage_errors_exit_2(capsys):
    assert run(capsys, "eval", "--family", "c01", "--s", "two")[0] == 2
    assert run(capsys, "eval", "--family", "nope", "--s", "2")[0] == 2
    assert run(capsys, "zeros", "--family", "c13", "--tmax", "10")[0] == 2
    assert run(capsys, "--workers", "0", "eval", "--family", "c01", "--s", "2")[0] == 2
    assert run(capsys)[0] == 2


def test_numerical_errors_exit_1(capsys):
    code, _, err = run(capsys, "eval", "--family", "c01", "--s", "1")
    assert code == 1 and "pole" in err
    assert run(capsys, "delta3", "--m", "1", "--s", "1")[0] == 1


def test_selfcheck_quick_passes(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "selfcheck", "--quick")
    assert time.perf_counter() - t0 < 60
    assert code == 0
    assert "FAIL" not in out


def test_selfcheck_detects_injected_fault(capsys):
    code, out, _ = run(capsys, "selfcheck", "--quick", "--inject-fault", "chebyshev", "--format", "json")
    assert code == 1
    failed = {c["name"] for c in json.loads(out) if not c["passed"]}
    assert "c14m_chebyshev_vs_direct" in failed


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "anglat.cli", "eval", "--family", "beta4", "--s", "1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert abs(json.loads(proc.stdout)["value"][0] - 0.7853981633974483) < 1e-14
