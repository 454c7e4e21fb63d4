"""Command-line interface.

Subcommands: ``run`` executes a scenario file and writes the trace CSV and
certificate file; ``exploit-eval`` replays strategy files against a stored
trace; ``experiment`` runs a named preset experiment; ``check`` validates
stored traces and certificates, optionally re-running the scenario and
re-verifying every certificate by brute force. Exit status: 0 on success,
1 on a failed experiment or check, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from ..deduction import ScriptedProcess, load_script
from ..errors import EngineError
from ..trading import evaluate_exploitation, load_strategy
from . import presets
from .experiments import (
    ExperimentReport,
    coherence_report,
    convergence_report,
    experiment_halting,
    experiment_net_update,
    experiment_paradox,
    experiment_provability,
    experiment_self_knowledge,
)
from .scenario import load_scenario
from .tracefiles import (
    certificates_text,
    read_certificates,
    read_trace_csv,
    save_exploitation_report,
    trace_csv_text,
    write_trace_csv,
)
from .verify import VerificationError, verify_budget_safety, verify_certificates

import io


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.horizon is not None:
        scenario.horizon = args.horizon
    trace = scenario.run()
    out = Path(args.out)
    out.write_text(trace_csv_text(trace))
    certs = Path(args.certs) if args.certs else out.with_suffix(out.suffix + ".certs.csv")
    certs.write_text(certificates_text(trace))
    print(f"wrote {out} ({trace.horizon} days) and {certs}")
    return 0


def _cmd_exploit_eval(args: argparse.Namespace) -> int:
    pricings = read_trace_csv(args.trace)
    horizon = args.horizon if args.horizon is not None else len(pricings)
    deduction = load_script(args.script) if args.script else ScriptedProcess({})
    trader_dir = Path(args.traders)
    paths = sorted(trader_dir.glob("*.txt"))
    if not paths:
        print(f"no *.txt strategy files under {trader_dir}", file=sys.stderr)
        return 2
    for path in paths:
        trader = load_strategy(path)
        report = evaluate_exploitation(trader, pricings, deduction, horizon)
        verdict = "exploitation trend" if report.exploitation_trend else "no exploitation"
        print(
            f"{trader.name}: running min {report.overall_min}, "
            f"final max {report.final_max}, verdict: {verdict}"
        )
        if args.out_dir:
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            save_exploitation_report(report, out_dir / f"{trader.name}.csv")
    return 0


def _run_experiment(args: argparse.Namespace) -> ExperimentReport:
    name = args.name
    horizon = args.horizon
    if name == "provability":
        return experiment_provability(presets.standard(horizon))
    if name == "paradox":
        p = Fraction(args.p)
        return experiment_paradox(
            presets.paradox(p, horizon, control=args.control), p
        )
    if name == "halting":
        return experiment_halting(presets.halting(horizon))
    if name == "self-knowledge":
        return experiment_self_knowledge(presets.self_knowledge(horizon))
    if name == "net-update":
        return experiment_net_update(presets.net_update(horizon, bins=args.bins))
    if name == "convergence":
        scenario = presets.standard(horizon)
        trace = scenario.run()
        start = max(1, (3 * horizon) // 4)
        return convergence_report(trace, scenario.probes, (start, horizon))
    if name == "coherence":
        scenario = presets.standard(horizon)
        trace = scenario.run()
        return coherence_report(trace, scenario.pairs)
    raise EngineError(f"unknown experiment {name!r}")


def _cmd_experiment(args: argparse.Namespace) -> int:
    report = _run_experiment(args)
    print(report.verdict_line())
    for key, value in sorted(report.details.items()):
        print(f"  {key}: {value}")
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        print(f"wrote {args.out}")
    if report.control or report.passed is None:
        return 0
    return 0 if report.passed else 1


def _cmd_check(args: argparse.Namespace) -> int:
    failures: list[str] = []
    pricings = read_trace_csv(args.trace)
    buffer = io.StringIO()
    write_trace_csv(pricings, buffer)
    if buffer.getvalue() != Path(args.trace).read_text():
        failures.append("trace CSV is not in canonical form (round-trip differs)")
    rows = read_certificates(args.certs)
    for day, epsilon, value, scales in rows:
        if value > epsilon:
            failures.append(f"day {day}: certificate value {value} exceeds epsilon {epsilon}")
        for scale in scales:
            if not (0 <= scale <= 1):
                failures.append(f"day {day}: scale {scale} outside [0, 1]")
    if len(rows) != len(pricings):
        failures.append(
            f"trace covers {len(pricings)} day(s) but certificates cover {len(rows)}"
        )
    if args.scenario:
        scenario = load_scenario(args.scenario)
        trace = scenario.run()
        if trace_csv_text(trace) != Path(args.trace).read_text():
            failures.append("re-run trace differs from the stored trace CSV")
        if certificates_text(trace) != Path(args.certs).read_text():
            failures.append("re-run certificates differ from the stored file")
        if args.brute_force:
            try:
                verify_certificates(scenario, trace)
                verify_budget_safety(scenario, trace)
            except VerificationError as exc:
                failures.append(str(exc))
    if failures:
        for failure in failures:
            print(f"check: {failure}", file=sys.stderr)
        return 1
    print("check: all validations passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefmarket",
        description="Belief markets over logical sentences with certified pricing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario file and write trace + certificates")
    run_p.add_argument("scenario")
    run_p.add_argument("--out", required=True, help="trace CSV output path")
    run_p.add_argument("--certs", help="certificate file path (default: <out>.certs.csv)")
    run_p.add_argument("--horizon", type=int, help="override the scenario horizon")
    run_p.set_defaults(func=_cmd_run)

    ee_p = sub.add_parser("exploit-eval", help="replay strategy files against a stored trace")
    ee_p.add_argument("trace")
    ee_p.add_argument("traders", help="directory of *.txt strategy files")
    ee_p.add_argument("--horizon", type=int)
    ee_p.add_argument("--script", help="deduction script for plausibility (default: empty)")
    ee_p.add_argument("--out-dir", help="write per-trader report CSVs here")
    ee_p.set_defaults(func=_cmd_exploit_eval)

    exp_p = sub.add_parser("experiment", help="run a named preset experiment")
    exp_p.add_argument(
        "name",
        choices=[
            "provability",
            "halting",
            "paradox",
            "self-knowledge",
            "net-update",
            "convergence",
            "coherence",
        ],
    )
    exp_p.add_argument("--horizon", type=int, default=200)
    exp_p.add_argument("--p", default="1/2", help="paradox threshold")
    exp_p.add_argument("--bins", type=int, default=8, help="net-update bin count")
    exp_p.add_argument("--control", action="store_true", help="run the control pool")
    exp_p.add_argument("--out", help="write the report JSON here")
    exp_p.set_defaults(func=_cmd_experiment)

    check_p = sub.add_parser("check", help="validate stored trace and certificate files")
    check_p.add_argument("trace")
    check_p.add_argument("certs")
    check_p.add_argument("--scenario", help="re-run this scenario and compare byte-for-byte")
    check_p.add_argument(
        "--brute-force",
        action="store_true",
        help="re-verify certificates by brute-force world enumeration (needs --scenario)",
    )
    check_p.set_defaults(func=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
