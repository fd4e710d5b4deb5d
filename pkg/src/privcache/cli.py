"""Command line: ``privcache bounds|verify|simulate|analyze <scenario.json>``.

Exit codes: 0 success, 2 invalid input, 3 verification failure (leakage or
decoding), 4 an exhaustive computation exceeded its guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .bounds import evaluate_all
from .codec import exact_expected_length, exact_leakage, verify_lossless
from .config import parse_mode
from .coupling import greedy_qstar, verify_u_constraints
from .errors import PrivCacheError, SizeLimit, ValidationError
from .montecarlo import McTables, demand_rngs, simulate
from .prob import entropy

REPORT_SCHEMA = "privcache.report/1"
DEFAULT_MC_SAMPLES = 100_000

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_VERIFY, EXIT_SIZE = 0, 1, 2, 3, 4


@dataclass
class RunReport:
    command: str
    provenance: dict
    scenario: dict
    demands: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    ok: bool = True

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "ok": self.ok,
            "provenance": self.provenance,
            "scenario": self.scenario,
            "demands": self.demands,
            "summary": self.summary,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _num(value: Fraction) -> dict:
    return {"exact": str(value), "decimal": float(value)}


def _scenario_info(s) -> dict:
    info = {"name": s.name, "kind": s.layer.kind, "x_alphabet": s.x_size, "T": s.T, "message_alphabet": s.layer.message_size}
    if s.layer.kind == "caching":
        p = s.layer.params
        info.update({"N": p.N, "K": p.K, "F": p.F, "M": str(p.M), "p": p.p, "subfile_bits": p.subfile_size})
    return info


def _provenance(s, command: str, seed: int, mode: str, samples: int, otp: bool) -> dict:
    return {
        "version": __version__,
        "command": command,
        "config_sha256": s.extras.get("sha256"),
        "seed": seed,
        "mode": mode if mode == "exact" else f"mc:{samples}",
        "otp": otp,
    }


def _demand_base(s, d, otp: bool) -> dict:
    plan = s.plan(d, otp=otp)
    qstar = greedy_qstar(plan.kernel)
    p_u = plan.rep.p_u
    analytic = plan.tables.part1_bits + plan.code.expected_length(p_u)
    return {
        "demand": list(d),
        "qstar": qstar.to_json(),
        "H_qstar": entropy(qstar),
        "p_u": p_u.to_json(),
        "code": plan.code.to_json(),
        "expected_length_analytic": _num(analytic),
    }


def cmd_bounds(s, T: int | None = None, demands=None, **_) -> RunReport:
    """Every bound per demand and the worst case."""
    report = evaluate_all(s, T, demands)
    body = report.to_json()
    return RunReport(
        "bounds",
        {},
        _scenario_info(s),
        body["per_demand"],
        {"T": body["T"], "worst_case": body["worst_case"], "worst_demand": body["worst_demand"], "worst_by_bound": body["worst_by_bound"]},
    )


def _check_key(s):
    if s.T < s.x_size:
        raise ValidationError(f"T: the two-part codec pads X and needs T >= |X| = {s.x_size}, got {s.T}")


def _receivers_ok(plan, states) -> tuple[bool, int]:
    """Every user decodes its demand from the true message and its cache, once per database value."""
    checked = 0
    for _, y in states:
        c = plan.tables.deliver(y)
        for k in plan.layer.users:
            checked += 1
            if plan.layer.receive(k, plan.layer.side_info(k, y), c, plan.demand) != plan.layer.target(k, y, plan.demand):
                return False, checked
    return True, checked


def cmd_verify(s, demands=None, mode="exact", samples=0, seed=0, otp=True, **_) -> RunReport:
    """Exhaustive (or sampled) losslessness and leakage per demand; ``ok`` is false on any violation."""
    _check_key(s)
    demands = s.demands() if demands is None else demands
    rows, ok = [], True
    rngs = demand_rngs(seed, len(demands))
    for d, rng in zip(demands, rngs):
        row = _demand_base(s, d, otp)
        plan = s.plan(d, otp=otp)
        if mode == "exact":
            lossless = verify_lossless(plan)
            leak = exact_leakage(plan)
            row["lossless"] = {"ok": lossless.ok, "checked": lossless.checked, "counterexample": lossless.counterexample}
            row["leakage"] = {"bits": leak.bits, "exact_zero": leak.independent, "method": "enumeration"}
            row["expected_length"] = _num(exact_expected_length(plan))
            good = lossless.ok and leak.independent
        else:
            functional, independent = verify_u_constraints(plan.joint_xc, plan.rep.p_u, plan.rep.f, plan.rep.sampler)
            tables = McTables.from_plan(plan)
            receivers, checked = _receivers_ok(plan, tables.states)
            stats = simulate(plan, samples, rng, tables=tables)
            zero = functional and independent and otp
            row["lossless"] = {"ok": receivers and functional and stats.mismatches == 0, "checked": checked, "mismatches": stats.mismatches}
            row["leakage"] = {
                "exact_zero": zero,
                "method": "certificate: U independent of X and X padded with a uniform key",
                "empirical_bits": stats.empirical_leakage(),
            }
            row["monte_carlo"] = stats.to_json()
            good = row["lossless"]["ok"] and zero
        row["ok"] = good
        ok = ok and good
        rows.append(row)
    return RunReport("verify", {}, _scenario_info(s), rows, {"all_ok": ok}, ok)


def cmd_simulate(s, demands=None, samples=DEFAULT_MC_SAMPLES, seed=0, otp=True, **_) -> RunReport:
    """Seeded Monte Carlo of the codec; byte-identical for a fixed scenario, seed and version."""
    _check_key(s)
    demands = s.demands() if demands is None else demands
    rows = []
    for d, rng in zip(demands, demand_rngs(seed, len(demands))):
        row = _demand_base(s, d, otp)
        stats = simulate(s.plan(d, otp=otp), samples, rng)
        row["monte_carlo"] = stats.to_json()
        rows.append(row)
    means = [r["monte_carlo"]["mean_length"] for r in rows if r["monte_carlo"]["mean_length"] is not None]
    return RunReport("simulate", {}, _scenario_info(s), rows, {"max_mean_length": max(means, default=None)})


def cmd_analyze(s, demands=None, mode="exact", samples=0, seed=0, otp=True, T=None, **_) -> RunReport:
    """Bounds and verification side by side, with the length-versus-bound check per demand."""
    b = cmd_bounds(s, T=T, demands=demands)
    v = cmd_verify(s, demands=demands, mode=mode, samples=samples, seed=seed, otp=otp)
    rows, ok = [], v.ok
    for bound_row, ver in zip(b.demands, v.demands):
        row = dict(ver)
        row["bounds"] = bound_row["bounds"]
        row["best_bound"] = bound_row["best"]
        general = next(e for e in bound_row["bounds"] if e["name"] == "ThmGeneral")
        length = Fraction(ver["expected_length_analytic"]["exact"])
        row["within_general_bound"] = float(length) <= general["value"]
        ok = ok and row["within_general_bound"]
        rows.append(row)
    summary = dict(b.summary)
    summary["all_ok"] = ok
    summary["max_expected_length"] = max((float(Fraction(r["expected_length_analytic"]["exact"])) for r in rows), default=None)
    return RunReport("analyze", {}, _scenario_info(s), rows, summary, ok)


COMMANDS = {"bounds": cmd_bounds, "verify": cmd_verify, "simulate": cmd_simulate, "analyze": cmd_analyze}


def _parse_demand(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad demand vector {text!r}; expected e.g. 1,2") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="privcache", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"privcache {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("scenario", help="scenario JSON file (or example1 / example2 for the shipped ones)")
    ap.add_argument("--demands", action="append", type=_parse_demand, help="demand vector such as 1,2; repeatable")
    ap.add_argument("--seed", type=int, help="overrides the scenario seed")
    ap.add_argument("--mode", help="exact or mc:<samples>; overrides the scenario mode")
    ap.add_argument("--T", dest="T", type=int, help="key alphabet size for bound selection")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--no-otp", action="store_true", help="test only: send X in the clear")
    return ap


def _demand_label(d) -> str:
    return "-".join(map(str, d)) or "()"


def _csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.command == "bounds":
        w.writerow(["demand", "bound", "value", "exact", "required_key_size", "applicable", "reason"])
        for row in report.demands:
            for e in row["bounds"]:
                w.writerow(
                    [_demand_label(row["demand"]), e["name"], e["value"], e["exact"], e["required_key_size"], e["applicable"], e["reason"]]
                )
        return buf.getvalue()
    w.writerow(["demand", "H_qstar", "expected_length", "leakage_zero", "lossless", "mc_mean_length", "mc_std_error"])
    for row in report.demands:
        mc = row.get("monte_carlo", {})
        w.writerow(
            [
                _demand_label(row["demand"]),
                row["H_qstar"],
                row["expected_length_analytic"]["exact"],
                row.get("leakage", {}).get("exact_zero", ""),
                row.get("lossless", {}).get("ok", ""),
                mc.get("mean_length", ""),
                mc.get("std_error", ""),
            ]
        )
    return buf.getvalue()


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv``, run the command and return ``(exit_code, text)``."""
    from .config import example_path, load_scenario

    args = build_parser().parse_args(argv)
    try:
        path = args.scenario
        if path in ("example1", "example2"):
            path = example_path(path)
        s = load_scenario(path)
        mode, samples = parse_mode(args.mode) if args.mode else (s.mode, s.samples)
        if args.command == "simulate" and mode == "exact":
            samples = DEFAULT_MC_SAMPLES
        seed = s.seed if args.seed is None else args.seed
        demands = [s.layer.check_demand(d) for d in args.demands] if args.demands else None
        report = COMMANDS[args.command](
            s, demands=demands, mode=mode, samples=samples, seed=seed, otp=not args.no_otp, T=args.T
        )
        report.provenance = _provenance(s, args.command, seed, mode, samples, not args.no_otp)
        if args.T is not None:
            report.provenance["T"] = args.T
    except ValidationError as exc:
        return EXIT_INVALID, f"invalid input: {exc}\n"
    except SizeLimit as exc:
        return EXIT_SIZE, f"size limit: {exc}\n"
    except PrivCacheError as exc:
        return EXIT_ERROR, f"error: {exc}\n"
    text = _csv(report) if args.format == "csv" else report.dumps()
    return (EXIT_OK if report.ok else EXIT_VERIFY), text


def main(argv=None) -> int:
    code, text = run(argv)
    args = build_parser().parse_args(argv) if code in (EXIT_OK, EXIT_VERIFY) else None
    if args is not None and args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        (sys.stdout if code in (EXIT_OK, EXIT_VERIFY) else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
