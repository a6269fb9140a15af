"""Command-line entry point (``vaxjo``).

Errors are reported on stderr as one JSON object ``{stage, code, message}``
and mapped to exit codes: 2 malformed input, 3 violated precondition,
4 numeric inconsistency.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bell import BellTriple, check_inequality, verify_on_random_spaces, violation_scan
from .errors import SchemaError, VaxjoError
from .flybox.config import scenario_from_dict
from .flybox.experiments import disturbing_sequential, run_scenario
from .frequency import detect_stabilization, read_sequence_csv, relative_frequencies
from .kolmogorov import ContextualData
from .pipeline import SEED_ENV, PipelineConfig, error_record, qlra_outputs, run_pipeline, scan_csv
from .serialization import csv_text, dumps, read_json, write_json


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _env_seed() -> int | None:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise SchemaError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def cmd_estimate(args) -> int:
    seq = read_sequence_csv(args.input)
    report = detect_stabilization(seq, args.window, args.tol)
    if args.format == "csv":
        freqs = relative_frequencies(seq)
        rows = [(str(v), freqs[v]) for v in seq.values]
        _emit(csv_text(("value", "frequency"), rows), args.output)
    else:
        _emit(dumps({"observable": seq.observable_name, **report.to_dict()}) + "\n", args.output)
    return 0


def cmd_qlra_build(args) -> int:
    data = ContextualData.from_dict(read_json(args.input))
    amplitude, operators, _, residuals = qlra_outputs(data, args.tolerance, args.mirror_phase)
    _emit(dumps(amplitude) + "\n", args.output)
    if args.operators and operators is not None:
        write_json(args.operators, operators)
    print(dumps({"kind": amplitude.kind, "residuals": residuals}), file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    if args.scenario is None:
        raise SchemaError("simulate needs --scenario FILE or the 'disturbing' subcommand")
    seed = args.seed if args.seed is not None else _env_seed()
    scenario = scenario_from_dict(read_json(args.scenario), seed=seed)
    result = run_scenario(scenario)
    if args.format == "csv":
        rows = []
        for name, rec in result.records.items():
            for key, count in sorted(rec.counts.items(), key=lambda kv: str(kv[0])):
                rows.append((name, _label(key), count))
        _emit(csv_text(("experiment", "outcome", "count"), rows), args.output)
    else:
        _emit(dumps({"scenario": scenario.to_dict(), **result.to_dict()}) + "\n", args.output)
    return 0


def _label(key) -> str:
    if isinstance(key, tuple):
        return ",".join(f"{k:+d}" for k in key)
    return f"{key:+d}"


def cmd_disturbing(args) -> int:
    seed = args.seed if args.seed is not None else (_env_seed() or 0)
    record = disturbing_sequential(args.phi0, args.phi, args.n, seed, args.workers)
    t = record.transition()
    if args.format == "csv":
        rows = [(_label((b, a)), float(t[i, j])) for i, b in enumerate((1, -1)) for j, a in enumerate((1, -1))]
        _emit(csv_text(("first,second", "probability"), rows), args.output)
    else:
        _emit(dumps({"record": record, "transition": t}) + "\n", args.output)
    return 0


def cmd_bell_check(args) -> int:
    triple = BellTriple.from_dict(read_json(args.input))
    result = check_inequality(triple, args.tol)
    _emit(dumps(result) + "\n", args.output)
    return 0


def cmd_bell_verify(args) -> int:
    result = verify_on_random_spaces(args.trials, args.seed)
    _emit(dumps(result) + "\n", args.output)
    return 0


def cmd_bell_scan(args) -> int:
    points = violation_scan(args.grid, args.tol)
    if args.format == "csv":
        _emit(scan_csv(points), args.output)
    else:
        doc = [{"phi_a": p.phi_a, "phi_b": p.phi_b, "phi_c": p.phi_c, "slack": p.slack} for p in points]
        _emit(dumps(doc) + "\n", args.output)
    return 0


def cmd_pipeline_run(args) -> int:
    path = Path(args.config)
    config = PipelineConfig.from_dict(read_json(path), base_dir=path.parent)
    manifest = run_pipeline(config)
    print(dumps({"status": manifest["status"], "output_dir": str(config.output_dir)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaxjo", description="Contextual probability and quantum-like representation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="relative frequencies and stabilization of an outcome sequence")
    p.add_argument("--input", required=True)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_estimate)

    q = sub.add_parser("qlra", help="build amplitudes from contextual data")
    qsub = q.add_subparsers(dest="qlra_command", required=True)
    qb = qsub.add_parser("build")
    qb.add_argument("--input", required=True)
    qb.add_argument("--output")
    qb.add_argument("--operators", help="also write the operator pair (complex amplitudes only)")
    qb.add_argument("--tolerance", type=float, default=1e-9)
    qb.add_argument("--mirror-phase", action="store_true")
    qb.set_defaults(func=cmd_qlra_build)

    s = sub.add_parser("simulate", help="run a fly-box scenario")
    s.add_argument("--scenario")
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--output")
    s.set_defaults(func=cmd_simulate)
    ssub = s.add_subparsers(dest="simulate_command")
    sd = ssub.add_parser("disturbing", help="sequential measurement under the sector-sine redistribution")
    sd.add_argument("--phi0", type=float, required=True)
    sd.add_argument("--phi", type=float, required=True)
    sd.add_argument("--n", type=int, required=True)
    sd.add_argument("--seed", type=int)
    sd.add_argument("--workers", type=int, default=1)
    sd.add_argument("--format", choices=("json", "csv"), default="json")
    sd.add_argument("--output")
    sd.set_defaults(func=cmd_disturbing)

    b = sub.add_parser("bell", help="Bell-type inequality for transition probabilities")
    bsub = b.add_subparsers(dest="bell_command", required=True)
    bc = bsub.add_parser("check")
    bc.add_argument("--input", required=True)
    bc.add_argument("--tol", type=float, default=1e-9)
    bc.add_argument("--output")
    bc.set_defaults(func=cmd_bell_check)
    bv = bsub.add_parser("verify")
    bv.add_argument("--trials", type=int, default=10_000)
    bv.add_argument("--seed", type=int, default=0)
    bv.add_argument("--output")
    bv.set_defaults(func=cmd_bell_verify)
    bs = bsub.add_parser("scan")
    bs.add_argument("--grid", type=int, default=64)
    bs.add_argument("--tol", type=float, default=1e-9)
    bs.add_argument("--format", choices=("json", "csv"), default="csv")
    bs.add_argument("--output")
    bs.set_defaults(func=cmd_bell_scan)

    pl = sub.add_parser("pipeline", help="run a multi-stage pipeline")
    plsub = pl.add_subparsers(dest="pipeline_command", required=True)
    pr = plsub.add_parser("run")
    pr.add_argument("--config", required=True)
    pr.set_defaults(func=cmd_pipeline_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except VaxjoError as exc:
        record = error_record(exc)
        if record["stage"] is None:
            record["stage"] = args.command
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
