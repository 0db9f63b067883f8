"""CLI contract: exit codes, payload reproducibility, schema validation."""

from __future__ import annotations

import json

import jsonschema
import pytest

from noisyshor.cli import load_report_schema, main


def run(argv, tmp_path, sub="run"):
    out = tmp_path / sub
    code = main(argv + ["--out", str(out)])
    return code, out


def test_simulate_instance_report(tmp_path):
    code, out = run(["simulate", "--N", "15", "--x", "7", "--mode", "exact",
                     "--trials", "60", "--seed", "1"], tmp_path)
    assert code == 0
    payload = json.loads((out / "report.json").read_text())
    jsonschema.validate(payload, load_report_schema())
    probs = dict((v, p) for v, p in payload["probabilities"])
    for peak in (0, 64, 128, 192):
        assert probs[peak] == pytest.approx(0.25, abs=1e-9)
    assert payload["pipeline"]["trials"] == 60
    assert payload["manifest"] == "manifest.json"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "simulate"
    assert set(manifest["outputs"]) == {"report.json", "report.csv"}


def test_simulate_synthetic_mc(tmp_path):
    code, out = run(["simulate", "--n", "10", "--omega", "10", "--ustar", "3",
                     "--mode", "full_noise", "--epsilon", "0.5", "--band", "3",
                     "--trials", "8", "--radius", "0", "--seed", "2"], tmp_path)
    assert code == 0
    payload = json.loads((out / "report.json").read_text())
    jsonschema.validate(payload, load_report_schema())
    assert payload["kind"] == "mc"
    assert payload["mc"]["trials"] == [8]
    csv_lines = (out / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "epsilon,mean,stderr,trials"


def test_simulate_gcd_shortcut(tmp_path):
    code, out = run(["simulate", "--N", "15", "--x", "6"], tmp_path)
    assert code == 0
    payload = json.loads((out / "report.json").read_text())
    assert payload["gcd_factor"] == 3


def test_exit_codes(tmp_path):
    bad_cfg, _ = run(["simulate", "--n", "8", "--omega", "10", "--mode",
                      "full_noise", "--epsilon", "1", "--band", "9"], tmp_path, "a")
    assert bad_cfg == 2  # band >= n in a noisy mode
    missing, _ = run(["simulate", "--mode", "exact"], tmp_path, "b")
    assert missing == 2
    capacity, _ = run(["simulate", "--N", "1025", "--x", "2"], tmp_path, "c")
    assert capacity == 3


def test_sweep_csv_and_diagnostics(tmp_path):
    code, out = run(["sweep", "--n", "10", "--omega", "10", "--ustar", "3",
                     "--modes", "full_noise,single_level",
                     "--epsilons", "0,0.5,1", "--bands", "3",
                     "--trials", "6", "--radius", "0", "--seed", "3"], tmp_path)
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "mode,band,epsilon,mean,stderr,trials"
    assert len(lines) == 1 + 2 * 3
    diag = json.loads((out / "diagnostics.json").read_text())
    assert {g["mode"] for g in diag["grid"]} == {"full_noise", "single_level"}


def test_verify_exit_codes(tmp_path):
    code, out = run(["verify", "--suite", "cos-moment", "--suite", "closeness",
                     "--seed", "4"], tmp_path)
    assert code == 0
    payload = json.loads((out / "verify.json").read_text())
    assert payload["passed"] and len(payload["suites"]) == 2
    bad, _ = run(["verify", "--suite", "nope"], tmp_path, "bad")
    assert bad == 2


def test_verify_bit_segment_suite(tmp_path):
    code, out = run(["verify", "--suite", "bit-segment", "--omega-max", "200"],
                    tmp_path)
    assert code == 0
    payload = json.loads((out / "verify.json").read_text())
    assert payload["suites"][0]["mismatches"] == 0


@pytest.mark.parametrize("argv", [
    ["survey", "--what", "fouvry", "--xmax", "2000"],
    ["survey", "--what", "brun-titchmarsh", "--x", "100000", "--dmax", "50"],
    ["survey", "--what", "rosser-schoenfeld", "--dmax", "20000"],
    ["survey", "--what", "hss", "--mbits", "10", "--samples", "120"],
    ["survey", "--what", "gcd", "--mbits", "10", "--samples", "120"],
    ["survey", "--what", "per-prime", "--mbits", "10", "--samples", "120"],
    ["survey", "--what", "ord2", "--mbits", "12"],
])
def test_survey_commands(argv, tmp_path):
    code, out = run(argv + ["--seed", "5"], tmp_path)
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["outputs"]) == 1
    assert (out / manifest["outputs"][0]).read_text().strip()


def test_payloads_reproducible_byte_for_byte(tmp_path):
    argv = ["simulate", "--n", "9", "--omega", "7", "--mode", "single_level",
            "--epsilon", "0.7", "--band", "2", "--trials", "5", "--radius", "1",
            "--seed", "99"]
    _, out1 = run(argv, tmp_path, "one")
    _, out2 = run(argv, tmp_path, "two")
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "report.csv").read_bytes() == (out2 / "report.csv").read_bytes()
    sv = ["survey", "--what", "gcd", "--mbits", "9", "--samples", "100", "--seed", "7"]
    _, s1 = run(sv, tmp_path, "s1")
    _, s2 = run(sv, tmp_path, "s2")
    assert (s1 / "survey_gcd.csv").read_bytes() == (s2 / "survey_gcd.csv").read_bytes()


def test_threads_do_not_change_payloads(tmp_path):
    base = ["simulate", "--n", "9", "--omega", "7", "--mode", "full_noise",
            "--epsilon", "0.5", "--band", "2", "--trials", "6", "--radius", "0",
            "--seed", "11"]
    _, a = run(base + ["--threads", "1"], tmp_path, "t1")
    _, b = run(base + ["--threads", "4"], tmp_path, "t4")
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
