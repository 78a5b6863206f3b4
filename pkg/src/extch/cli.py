"""Command-line front end: ``audit``, ``qscan``, ``simulate``, ``certify``.

Exit codes: 0 success, 2 invalid input, 3 assertion or verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import lhv_audit as la
from . import montecarlo as mc
from . import quantum as qm
from .core import Angle, AngleConfig, OutcomeSelector

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3


class InputError(Exception):
    """Invalid command-line arguments or config contents."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def fmt(x: float | None) -> str:
    return "null" if x is None else format(x, ".12g")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _to_radians(value: float, unit: str) -> float:
    return math.radians(value) if unit == "deg" else float(value)


# ---------------------------------------------------------------- audit


def cmd_audit(args) -> int:
    mode = la.AuditMode(args.mode)
    sel = OutcomeSelector(args.r, args.q)
    result = la.run_audit(mode, sel, args.tol)
    ok = result.within_bounds(tol=args.tol)
    checks = {
        "max": la.verify_certificate(result.maximum, result.problem, args.tol),
        "min": la.verify_certificate(result.minimum, result.problem, args.tol),
    }

    summary = {
        "mode": mode.value,
        "selector": {"r": sel.r, "q": sel.q},
        "max": result.maximum.objective_value,
        "min": result.minimum.objective_value,
        "claimed_bounds": [-1.0, 0.0],
        "within_bounds": ok,
        "certificates_verified": all(c.passed for c in checks.values()),
        "tolerance": args.tol,
    }
    witness = None
    if not ok:
        cert = result.maximum if result.maximum.objective_value > args.tol else result.minimum
        witness = [
            {"vertex": i, "weight": w, "strategy": result.problem.vertices[i].describe()}
            for i, w in sorted(cert.weights.items())
        ]
        summary["witness"] = {"objective": cert.objective_value, "members": witness}

    if args.out:
        out = Path(args.out)
        _write(out / "certificate_max.json", _dump(result.maximum.to_dict()))
        _write(out / "certificate_min.json", _dump(result.minimum.to_dict()))
        _write(out / "summary.json", _dump(summary))

    print(f"mode={mode.value} r={sel.r:+d} q={sel.q:+d}")
    print(f"max S'_exp = {fmt(result.maximum.objective_value)}")
    print(f"min S'_exp = {fmt(result.minimum.objective_value)}")
    for name, rep in checks.items():
        print(f"{name} certificate: {rep.summary()}")
    if args.assert_bounds:
        if not ok:
            print(f"bounds [-1, 0] VIOLATED; witness ensemble (objective {fmt(summary['witness']['objective'])}):")
            for m in witness:
                print(f"  w={fmt(m['weight'])}  vertex {m['vertex']}: {m['strategy']}")
            return EXIT_FAILED
        print("bounds [-1, 0] hold")
    return EXIT_OK


# ---------------------------------------------------------------- qscan


def cmd_qscan(args) -> int:
    try:
        dp = qm.DetectorParams(args.eta1, args.eta2, args.f, args.F)
    except ValueError as e:
        raise InputError(str(e)) from e
    lo = _to_radians(args.phi_min, args.unit)
    hi = _to_radians(args.phi_max, args.unit)
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    if not 0.0 <= lo < hi <= math.pi:
        raise InputError("need 0 <= phi-min < phi-max <= pi")
    sel = OutcomeSelector(args.r, args.q)

    grid = np.linspace(lo, hi, args.steps)
    result = qm.scan(dp, grid, sel)

    g_lo, g_hi = qm.find_violation_interval(args.tol)
    summary = {
        "params": {"eta1": dp.eta1, "eta2": dp.eta2, "f": dp.f, "F": dp.F},
        "selector": {"r": sel.r, "q": sel.q},
        "phi_min": lo,
        "phi_max": hi,
        "steps": args.steps,
        "g_interval": [g_lo, g_hi],
        "phiLo": None,
        "phiHi": None,
        "phiStar": None,
        "gStar": None,
        "sprime_max_on_grid": max(result.sprimes),
        "violated": False,
    }
    # The g curve does not depend on the parameters; S' only violates when its
    # prefactor is nonzero. The refined interval applies to r = q = +1.
    if dp.scale > 0.0 and sel == OutcomeSelector(1, 1):
        a, b = max(g_lo, lo), min(g_hi, hi)
        if a < b:
            star, gstar = qm.find_max_violation(args.tol, bracket=(a, b))
            summary.update(phiLo=a, phiHi=b, phiStar=star, gStar=gstar, violated=True)
            summary["sprime_star"] = qm.sprime_closed_form(dp, star)
    elif summary["sprime_max_on_grid"] > args.tol:
        summary["violated"] = True

    if args.out:
        out = Path(args.out)
        _write(out / "scan.csv", result.to_csv())
        _write(out / "summary.json", _dump(summary))

    if summary["phiLo"] is None:
        print("violation interval: empty")
    else:
        print(f"violation interval: ({fmt(summary['phiLo'])}, {fmt(summary['phiHi'])}) rad")
        print(f"max violation: g = {fmt(summary['gStar'])} at phi = {fmt(summary['phiStar'])} rad")
    print(f"max S' on grid = {fmt(summary['sprime_max_on_grid'])}")
    return EXIT_OK


# ---------------------------------------------------------------- simulate

_SIM_KEYS = {"detector", "angles", "events_per_pair", "seed", "selector", "z_threshold"}
_DETECTOR_KEYS = {"eta1", "eta2", "f", "F"}
_ANGLE_KEYS = {"unit", "a", "b", "a_prime", "b_prime", "phi"}


def _check_keys(d, allowed: set[str], where: str, required: set[str] = frozenset()) -> None:
    if not isinstance(d, dict):
        raise InputError(f"{where} must be a JSON object")
    unknown = set(d) - allowed
    if unknown:
        raise InputError(f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = set(required) - set(d)
    if missing:
        raise InputError(f"missing field(s) in {where}: {sorted(missing)}")


def parse_sim_config(raw: dict) -> tuple[mc.SimConfig, float]:
    """Validate a simulate config; returns the config and the z threshold."""
    _check_keys(raw, _SIM_KEYS, "config", {"detector", "angles", "events_per_pair", "seed"})
    _check_keys(raw["detector"], _DETECTOR_KEYS, "detector")
    ang = raw["angles"]
    _check_keys(ang, _ANGLE_KEYS, "angles", {"unit"})
    unit = ang["unit"]
    if unit not in ("rad", "deg"):
        raise InputError("angles.unit must be 'rad' or 'deg'")
    try:
        if "phi" in ang:
            if set(ang) - {"unit", "phi"}:
                raise InputError("angles: give either phi or the four directions, not both")
            angles = AngleConfig.from_phi(_to_radians(ang["phi"], unit))
        else:
            if not {"a", "b", "a_prime", "b_prime"} <= set(ang):
                raise InputError("angles needs phi or all of a, b, a_prime, b_prime")
            angles = AngleConfig(*(Angle(_to_radians(ang[k], unit)) for k in ("a", "b", "a_prime", "b_prime")))
        dp = qm.DetectorParams(**raw["detector"])
        sel_raw = raw.get("selector", {"r": 1, "q": 1})
        _check_keys(sel_raw, {"r", "q"}, "selector")
        sel = OutcomeSelector(**sel_raw)
        n, seed = raw["events_per_pair"], raw["seed"]
        if not isinstance(n, int) or isinstance(n, bool) or not isinstance(seed, int) or isinstance(seed, bool):
            raise InputError("events_per_pair and seed must be integers")
        cfg = mc.SimConfig(dp, angles, n, seed, sel)
        z = float(raw.get("z_threshold", 4.0))
    except (TypeError, ValueError) as e:
        raise InputError(str(e)) from e
    return cfg, z


def cmd_simulate(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read config {args.config}: {e}") from e
    cfg, z = parse_sim_config(raw)
    report = mc.run_experiment(cfg)
    verdict = mc.check_assumption_a(report, z)

    if args.out:
        out = Path(args.out)
        _write(out / "report.json", report.to_json())
        _write(out / "counts.csv", report.counts_csv())

    print(f"S'_exp estimate = {fmt(report.sprime_estimate)} +/- {fmt(report.sprime_std_error)}")
    if verdict.passed:
        print(f"assumption A: PASS (all z < {fmt(z)})")
    else:
        bad = ", ".join(f"{a} vs {b}" for a, b in verdict.offending)
        print(f"assumption A: FAIL at z >= {fmt(z)} for {bad}")
        if args.assert_a:
            return EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------- certify


def cmd_certify(args) -> int:
    try:
        raw = json.loads(Path(args.certificate).read_text())
        cert = la.LpCertificate.from_dict(raw)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise InputError(f"cannot parse certificate {args.certificate}: {e}") from e
    tol = cert.tolerance if args.tol is None else args.tol
    problem = la.build_audit_lp(cert.mode, cert.sense or la.Sense.MAXIMIZE, cert.selector)
    try:
        report = la.verify_certificate(cert, problem, tol)
    except la.MismatchedProblem as e:
        print(f"certificate does not match its problem: {e}")
        return EXIT_FAILED
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="extch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sign = dict(type=int, choices=(1, -1), default=1)

    a = sub.add_parser("audit", help="LP audit of the extended bounds over hidden-variable ensembles")
    a.add_argument("--mode", choices=[m.value for m in la.AuditMode], default=la.AuditMode.SYMMETRIC.value)
    a.add_argument("--r", **sign)
    a.add_argument("--q", **sign)
    a.add_argument("--out", help="directory for certificates and summary")
    a.add_argument("--assert-bounds", action="store_true")
    a.add_argument("--tol", type=float, default=la.DEFAULT_TOL)
    a.set_defaults(func=cmd_audit)

    q = sub.add_parser("qscan", help="quantum prediction scan over phi")
    for name in ("eta1", "eta2", "f", "F"):
        q.add_argument(f"--{name}", type=float, default=1.0)
    q.add_argument("--phi-min", type=float, default=0.0)
    q.add_argument("--phi-max", type=float, default=math.pi)
    q.add_argument("--unit", choices=("rad", "deg"), default="rad")
    q.add_argument("--steps", type=int, default=1000)
    q.add_argument("--r", **sign)
    q.add_argument("--q", **sign)
    q.add_argument("--tol", type=float, default=qm.DEFAULT_TOL)
    q.add_argument("--out", help="directory for scan.csv and summary.json")
    q.set_defaults(func=cmd_qscan)

    s = sub.add_parser("simulate", help="Monte Carlo run from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="directory for report.json and counts.csv")
    s.add_argument("--assert-a", action="store_true", help="exit 3 if the assumption-A test fails")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("certify", help="re-verify an LP certificate")
    c.add_argument("--certificate", required=True)
    c.add_argument("--tol", type=float, default=None)
    c.set_defaults(func=cmd_certify)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
