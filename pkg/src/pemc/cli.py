"""Command-line interface.

Subcommands:
    validate  parse and validate a scenario file
    run       baseline + optimizer runs, writes report.json and CSV traces
    sweep     battery-capacity sweep, writes sweep.csv
    oracle    exhaustive schedule enumeration on small instances

Exit codes: 0 success, 2 validation error, 3 runtime/infeasibility error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ._engine import BACKEND
from .errors import PemcError, ValidationError
from .experiment import (
    run_capacity_sweep,
    run_experiment,
    report_to_dict,
    write_convergence_csv,
    write_report,
    write_sweep_csv,
    write_trace_csv,
)
from .loads import total_packet_demand
from .optimizers import ALGORITHMS, OptimizerConfig, ScheduleObjective, exhaustive_oracle
from .scenario import load_scenario

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(OptimizerConfig)}


def _parse_configs(args) -> list[OptimizerConfig]:
    if args.algorithm == "all":
        selected = list(ALGORITHMS)
    else:
        selected = [args.algorithm]

    overrides: dict = {}
    explicit: list[dict] | None = None
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot open config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: invalid JSON: {exc}") from exc
        if isinstance(doc, list):
            explicit = doc
        elif isinstance(doc, dict):
            overrides = doc
        else:
            raise ValidationError(f"{args.config}: expected an object or a list")

    def build(entry: dict) -> OptimizerConfig:
        unknown = set(entry) - _CONFIG_FIELDS
        if unknown:
            raise ValidationError(
                f"unknown optimizer config field(s): {', '.join(sorted(unknown))}"
            )
        return OptimizerConfig(**entry).validate()

    if explicit is not None:
        configs = [build(entry) for entry in explicit]
        if args.algorithm != "all":
            configs = [c for c in configs if c.algorithm == args.algorithm]
            if not configs:
                raise ValidationError(
                    f"config file has no entry for algorithm '{args.algorithm}'"
                )
        return configs
    return [build({**overrides, "algorithm": alg}) for alg in selected]


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(f"scenario '{sc.name}' is valid")
    print(f"  horizon: {sc.horizon} slots x {sc.slot_hours} h")
    print(f"  loads: {len(sc.loads)}, total demand "
          f"{total_packet_demand(sc.loads, sc.horizon):.3f} kWh")
    print(f"  battery: [{sc.battery.capacity_min}, {sc.battery.capacity_max}] kWh")
    print(f"  kernel backend: {BACKEND}")
    return 0


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    configs = _parse_configs(args)
    report = run_experiment(sc, configs, seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out / "report.json")
    write_trace_csv(report.baseline_trace, out / "trace_baseline.csv")
    for oc in report.outcomes:
        write_trace_csv(oc.trace, out / f"trace_{oc.algorithm}.csv")
        write_convergence_csv(oc.result, out / f"convergence_{oc.algorithm}.csv")

    if args.format == "json":
        print(json.dumps(report_to_dict(report), indent=2, sort_keys=True))
    else:
        print("algorithm,total_cents,pct_cost_reduction,evaluations")
        print(f"baseline,{report.baseline.total:.6f},0.000000,0")
        for oc in report.outcomes:
            print(
                f"{oc.algorithm},{oc.breakdown.total:.6f},"
                f"{oc.pct_cost_reduction:.6f},{oc.result.evaluations}"
            )
    print(f"outputs written to {out}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    capacities = [float(v) for v in args.capacities.split(",") if v.strip()]
    configs = _parse_configs(args)
    if len(configs) != 1:
        raise ValidationError("sweep runs a single algorithm; pass --algorithm")
    points = run_capacity_sweep(sc, capacities, configs[0], seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(points, out / "sweep.csv")
    print("capacity_kwh,baseline_total,optimized_total")
    for pt in points:
        print(f"{pt.capacity:g},{pt.baseline_total:.6f},{pt.optimized_total:.6f}")
    print(f"outputs written to {out}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    sc = load_scenario(args.scenario)
    objective = ScheduleObjective(sc)
    starts, cost = exhaustive_oracle(objective, sc.loads, sc.horizon, limit=args.limit)
    result = {
        "scenario": sc.name,
        "best_starts": dict(zip([ld.id for ld in sc.loads], map(int, starts))),
        "best_cost": cost,
        "schedules_enumerated": objective.evaluations,
    }
    payload = json.dumps(result, indent=2, sort_keys=True)
    print(payload)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle.json").write_text(payload + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pemc",
        description="Packetized energy management controller simulator and optimizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_run_opts=True):
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        if with_run_opts:
            p.add_argument("--seed", type=int, default=0, help="master RNG seed")
            p.add_argument("--out", default="pemc_out", help="output directory")
            p.add_argument("--config", help="optimizer config JSON path")
            p.add_argument(
                "--algorithm",
                choices=[*ALGORITHMS, "all"],
                default="all",
                help="which optimizer(s) to run",
            )

    p_val = sub.add_parser("validate", help="validate a scenario file")
    common(p_val, with_run_opts=False)
    p_val.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run baseline and optimizers")
    common(p_run)
    p_run.add_argument(
        "--format", choices=["json", "csv"], default="json",
        help="stdout summary format",
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="battery capacity sweep")
    common(p_sweep)
    p_sweep.add_argument(
        "--capacities", default="5,10,20",
        help="comma-separated battery capacities in kWh (increasing)",
    )
    p_sweep.set_defaults(func=cmd_sweep, algorithm="ga")

    p_oracle = sub.add_parser("oracle", help="exhaustive schedule enumeration")
    common(p_oracle, with_run_opts=False)
    p_oracle.add_argument("--out", help="optional output directory")
    p_oracle.add_argument(
        "--limit", type=int, default=1_000_000,
        help="refuse above this many schedules",
    )
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except PemcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
