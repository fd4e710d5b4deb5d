import json
import subprocess
import sys

import pytest

from privcache import __version__
from privcache.cli import EXIT_INVALID, EXIT_OK, EXIT_SIZE, EXIT_VERIFY, REPORT_SCHEMA, main, run


def report(argv):
    code, text = run(argv)
    assert code == EXIT_OK, text
    return json.loads(text)


def test_bounds_example1():
    r = report(["bounds", "example1"])
    assert r["schema"] == REPORT_SCHEMA and r["command"] == "bounds"
    assert r["provenance"]["version"] == __version__
    assert r["provenance"]["seed"] == 7
    assert r["scenario"]["p"] == 1 and r["scenario"]["message_alphabet"] == 2
    assert len(r["demands"]) == 4
    assert r["summary"]["worst_by_bound"]["ThmGeneral"]["value"] == pytest.approx(4.9433, abs=1e-4)


def test_bounds_example2_worst_case():
    r = report(["bounds", "example2"])
    assert r["summary"]["worst_case"] == pytest.approx(3.7296, abs=1e-4)
    assert r["demands"][0]["best"] == "CommonInfoK"


def test_verify_exact():
    r = report(["verify", "example1"])
    assert r["ok"] and r["summary"]["all_ok"]
    for row in r["demands"]:
        assert row["leakage"]["exact_zero"] and row["leakage"]["bits"] == 0.0
        assert row["lossless"]["ok"]


def test_verify_monte_carlo():
    r = report(["verify", "example1", "--mode", "mc:5000", "--demands", "1,2"])
    row = r["demands"][0]
    assert row["monte_carlo"]["samples"] == 5000 and row["monte_carlo"]["mismatches"] == 0
    assert row["leakage"]["exact_zero"]


def test_verify_without_pad_fails():
    code, text = run(["verify", "example1", "--no-otp", "--demands", "1,2"])
    assert code == EXIT_VERIFY
    assert not json.loads(text)["ok"]


def test_analyze():
    r = report(["analyze", "example2"])
    row = r["demands"][0]
    assert row["within_general_bound"]
    assert row["expected_length_analytic"]["exact"] == "11/4"
    assert r["summary"]["all_ok"]


def test_simulate_byte_identical():
    argv = ["simulate", "example1", "--mode", "mc:20000", "--seed", "3"]
    assert run(argv) == run(argv)


def test_simulate_seed_changes_output():
    a = run(["simulate", "example2", "--mode", "mc:2000", "--seed", "1"])[1]
    b = run(["simulate", "example2", "--mode", "mc:2000", "--seed", "2"])[1]
    assert a != b


def test_simulate_zero_samples():
    r = report(["simulate", "example2", "--mode", "mc:0"])
    assert r["demands"][0]["monte_carlo"]["mean_length"] is None
    assert r["summary"]["max_mean_length"] is None


def test_csv_formats():
    code, text = run(["bounds", "example2", "--format", "csv"])
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0].startswith("demand,bound,value") and len(lines) == 7
    code, text = run(["simulate", "example2", "--format", "csv", "--mode", "mc:100"])
    assert text.splitlines()[0].startswith("demand,H_qstar")


def test_invalid_inputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "direct"}')
    code, text = run(["bounds", str(bad)])
    assert code == EXIT_INVALID and "x_alphabet" in text
    assert run(["bounds", str(tmp_path / "missing.json")])[0] == EXIT_INVALID
    assert run(["bounds", "example1", "--demands", "1,3"])[0] == EXIT_INVALID
    assert run(["verify", "example1", "--mode", "sometimes"])[0] == EXIT_INVALID


def test_small_key_rejected_for_codec(tmp_path):
    cfg = json.loads((__import__("privcache").config.example_path("example1")).read_text())
    cfg["T"] = 2
    p = tmp_path / "t2.json"
    p.write_text(json.dumps(cfg))
    assert run(["verify", str(p)])[0] == EXIT_INVALID


def test_size_guard(monkeypatch):
    import privcache.codec as codec

    monkeypatch.setattr(codec, "EXACT_GUARD", 10)
    monkeypatch.setattr(codec.verify_lossless, "__defaults__", (None, 10))
    code, text = run(["verify", "example1"])
    assert code == EXIT_SIZE and "size limit" in text


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["bounds", "example2", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "bounds"


def test_T_override_in_provenance():
    r = report(["bounds", "example1", "--T", "2"])
    assert r["provenance"]["T"] == 2 and r["summary"]["T"] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "privcache.cli", "bounds", "example2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "bounds"
