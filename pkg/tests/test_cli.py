import csv
import json
import math
from pathlib import Path

import pytest

from extch.cli import main

ROOT = Path(__file__).resolve().parents[1]
EXAMPLE = ROOT / "configs" / "simulate_example.json"
GOLDEN = ROOT / "tests" / "golden" / "simulate_example"


# -- audit


def test_audit_symmetric_asserts(tmp_path):
    assert main(["audit", "--mode", "symmetric", "--assert-bounds", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["max"] == pytest.approx(0.0, abs=1e-9)
    assert summary["min"] == pytest.approx(-1.0, abs=1e-9)
    assert summary["within_bounds"] and summary["certificates_verified"]


def test_audit_unconstrained_fails_with_witness(tmp_path, capsys):
    assert main(["audit", "--mode", "unconstrained", "--assert-bounds", "--out", str(tmp_path)]) == 3
    out = capsys.readouterr().out
    assert "VIOLATED" in out and "witness" in out
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["witness"]["objective"] == pytest.approx(2.0, abs=1e-9)


def test_audit_without_assert_is_success():
    assert main(["audit", "--mode", "unconstrained"]) == 0


@pytest.mark.parametrize("argv", [["audit", "--mode", "bogus"], ["audit", "--r", "2"], ["nope"], []])
def test_audit_invalid(argv):
    assert main(argv) == 2


def test_audit_minus_selector(tmp_path):
    assert main(["audit", "--r", "-1", "--q", "1", "--assert-bounds", "--out", str(tmp_path)]) == 0
    cert = json.loads((tmp_path / "certificate_max.json").read_text())
    assert cert["selector"] == {"r": -1, "q": 1}


# -- certify


def test_certify_round_trip(tmp_path):
    main(["audit", "--mode", "unconstrained", "--out", str(tmp_path)])
    for name in ("certificate_max.json", "certificate_min.json"):
        assert main(["certify", "--certificate", str(tmp_path / name)]) == 0


def test_certify_tampered(tmp_path):
    main(["audit", "--mode", "unconstrained", "--out", str(tmp_path)])
    path = tmp_path / "certificate_max.json"
    cert = json.loads(path.read_text())
    cert["weights"][0][1] += 1e-3
    path.write_text(json.dumps(cert))
    assert main(["certify", "--certificate", str(path)]) == 3


def test_certify_truncated(tmp_path):
    main(["audit", "--out", str(tmp_path)])
    path = tmp_path / "certificate_max.json"
    path.write_text(path.read_text()[:40])
    assert main(["certify", "--certificate", str(path)]) == 2


def test_certify_missing_file(tmp_path):
    assert main(["certify", "--certificate", str(tmp_path / "none.json")]) == 2


# -- qscan


def test_qscan_full_range(tmp_path):
    assert main(["qscan", "--phi-min", "0", "--phi-max", str(math.pi), "--steps", "1000", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["phiHi"] == pytest.approx(1.19606, abs=1e-5)
    assert summary["gStar"] == pytest.approx(0.82843, abs=1e-5)
    with open(tmp_path / "scan.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["phi", "margin_g", "sprime", "eta1", "eta2", "f", "F"]
    assert len(rows) == 1001


def test_qscan_degrees(tmp_path):
    assert main(["qscan", "--unit", "deg", "--phi-min", "0", "--phi-max", "180", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["phi_max"] == pytest.approx(math.pi)


def test_qscan_no_correlation(tmp_path):
    assert main(["qscan", "--F", "0", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["phiLo"] is None and summary["phiHi"] is None and not summary["violated"]


@pytest.mark.parametrize(
    "extra", [["--steps", "1"], ["--phi-min", "1", "--phi-max", "0.5"], ["--phi-max", "4"], ["--eta1", "1.5"]]
)
def test_qscan_invalid(extra):
    assert main(["qscan", *extra]) == 2


# -- simulate


def test_simulate_golden(tmp_path):
    assert main(["simulate", "--config", str(EXAMPLE), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "report.json").read_bytes() == (GOLDEN / "report.json").read_bytes()
    assert (tmp_path / "counts.csv").read_bytes() == (GOLDEN / "counts.csv").read_bytes()


def test_simulate_missing_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2


def _with(tmp_path, **changes):
    raw = json.loads(EXAMPLE.read_text())
    raw.update(changes)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return str(path)


@pytest.mark.parametrize(
    "changes",
    [
        {"events_per_pair": 0},
        {"events_per_pair": 1.5},
        {"bogus": 1},
        {"detector": {"eta1": 0.5, "eta3": 1}},
        {"detector": {"eta1": 2.0}},
        {"angles": {"unit": "grad", "phi": 1}},
        {"angles": {"unit": "rad", "a": 0.1}},
        {"selector": {"r": 0, "q": 1}},
    ],
)
def test_simulate_invalid_config(tmp_path, changes):
    assert main(["simulate", "--config", _with(tmp_path, **changes)]) == 2


def test_simulate_explicit_angles(tmp_path, capsys):
    path = _with(tmp_path, angles={"unit": "deg", "a": 0, "b": 22.5, "a_prime": 45, "b_prime": 67.5}, events_per_pair=1000)
    assert main(["simulate", "--config", path]) == 0
    assert "assumption A: PASS" in capsys.readouterr().out


def test_simulate_is_repeatable(tmp_path):
    path = _with(tmp_path, events_per_pair=5000)
    main(["simulate", "--config", path, "--out", str(tmp_path / "a")])
    main(["simulate", "--config", path, "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
