"""Experiment orchestration: baseline, per-algorithm runs, capacity sweeps
and report emission.

The no-controller baseline starts every load at its arrival slot. That
schedule is also injected into each optimizer's initial population, so an
optimized cost can never exceed the baseline. ``report.json`` is fully
regenerable from (scenario, configs, seed): wall times are kept out of it on
purpose.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._engine import BACKEND
from .dispatch import (
    CostBreakdown,
    DispatchTrace,
    ScheduleMatrix,
    average_delays,
    decode_schedule,
    schedule_from_starts,
    simulate,
)
from .errors import ValidationError
from .optimizers import (
    RUNNERS,
    OptimizerConfig,
    RunResult,
    ScheduleObjective,
)
from .scenario import Scenario


@dataclass
class AlgorithmOutcome:
    """One optimizer's result on a scenario, priced and traced."""

    algorithm: str
    config: OptimizerConfig
    result: RunResult
    schedule: ScheduleMatrix
    trace: DispatchTrace
    breakdown: CostBreakdown
    avg_delays: list[float]
    pct_cost_reduction: float


@dataclass
class ExperimentReport:
    """Baseline plus per-algorithm outcomes for one scenario and seed."""

    scenario_name: str
    seed: int
    load_ids: list[str]
    baseline: CostBreakdown
    baseline_trace: DispatchTrace
    baseline_schedule: ScheduleMatrix
    outcomes: list[AlgorithmOutcome]


@dataclass
class SweepPoint:
    capacity: float
    baseline_total: float
    optimized_total: float


def baseline_schedule(sc: Scenario) -> ScheduleMatrix:
    """Immediate-start schedule: every load begins at its arrival slot."""
    return schedule_from_starts(
        [ld.arrival_slot for ld in sc.loads], sc.loads, sc.horizon
    )


def run_baseline(sc: Scenario) -> CostBreakdown:
    """Cost of operating without the controller (immediate starts)."""
    return simulate(sc, baseline_schedule(sc))[1]


def run_experiment(
    sc: Scenario, configs: list[OptimizerConfig], seed: int = 0
) -> ExperimentReport:
    """Run the baseline plus one optimizer per config.

    Per-run random streams are spawned from ``seed`` in config order.
    """
    if not configs:
        raise ValidationError("at least one optimizer config is required")
    for cfg in configs:
        cfg.validate()

    base_sched = baseline_schedule(sc)
    base_trace, base_break = simulate(sc, base_sched)
    objective = ScheduleObjective(sc)
    dims = len(sc.loads) * sc.horizon
    children = np.random.SeedSequence(seed).spawn(len(configs))

    outcomes = []
    for cfg, child in zip(configs, children):
        run_seed = child if cfg.seed is None else cfg.seed
        result = RUNNERS[cfg.algorithm](
            objective, dims, cfg, seed=run_seed, seed_genomes=[base_sched.genome]
        )
        if dims == 0:
            sched = base_sched
        else:
            sched = decode_schedule(result.best_genome, sc.loads, sc.horizon)
        trace, breakdown = simulate(sc, sched)
        if base_break.total != 0.0:
            pct = (base_break.total - breakdown.total) / base_break.total
        else:
            pct = 0.0
        outcomes.append(
            AlgorithmOutcome(
                algorithm=cfg.algorithm,
                config=cfg,
                result=result,
                schedule=sched,
                trace=trace,
                breakdown=breakdown,
                avg_delays=average_delays(sc, sched),
                pct_cost_reduction=pct,
            )
        )
    return ExperimentReport(
        scenario_name=sc.name,
        seed=seed,
        load_ids=[ld.id for ld in sc.loads],
        baseline=base_break,
        baseline_trace=base_trace,
        baseline_schedule=base_sched,
        outcomes=outcomes,
    )


def run_capacity_sweep(
    sc: Scenario,
    capacities: list[float],
    config: OptimizerConfig,
    seed: int = 0,
) -> list[SweepPoint]:
    """Re-run baseline + one optimizer per battery capacity.

    Capacities must be strictly increasing and above the capacity floor. The
    initial state is clamped to each capacity so small batteries start full
    rather than invalid.
    """
    if not capacities:
        raise ValidationError("at least one capacity is required")
    if any(b <= a for a, b in zip(capacities, capacities[1:])):
        raise ValidationError("capacities must be strictly increasing")
    config.validate()

    points = []
    children = np.random.SeedSequence(seed).spawn(len(capacities))
    for cap, child in zip(capacities, children):
        if cap <= sc.battery.capacity_min:
            raise ValidationError(
                f"capacity {cap} must exceed capacity_min {sc.battery.capacity_min}"
            )
        battery = dataclasses.replace(sc.battery, capacity_max=cap)
        scenario = dataclasses.replace(
            sc,
            battery=battery,
            initial_state=dataclasses.replace(
                sc.initial_state, stored=min(sc.initial_state.stored, cap)
            ),
            _prepared=None,
        )
        base = run_baseline(scenario)
        objective = ScheduleObjective(scenario)
        dims = len(scenario.loads) * scenario.horizon
        result = RUNNERS[config.algorithm](
            objective,
            dims,
            config,
            seed=child if config.seed is None else config.seed,
            seed_genomes=[baseline_schedule(scenario).genome],
        )
        points.append(
            SweepPoint(
                capacity=float(cap),
                baseline_total=base.total,
                optimized_total=result.best_cost,
            )
        )
    return points


def _breakdown_dict(b: CostBreakdown, trace: DispatchTrace | None = None) -> dict:
    out = {
        "delay_cost": b.delay_cost,
        "transaction_cost": b.transaction_cost,
        "degradation_cost": b.degradation_cost,
        "penalty": b.penalty,
        "total": b.total,
    }
    if trace is not None:
        out["buy_cents"] = trace.buy_cents
        out["sell_cents"] = trace.sell_cents
        out["bought_kwh"] = float(np.sum(trace.grid_bought))
        out["sold_kwh"] = float(np.sum(trace.grid_sold))
    return out


def report_to_dict(report: ExperimentReport) -> dict:
    """JSON-ready report. Deterministic for a fixed (scenario, configs,
    seed): no wall times, sorted keys at serialization."""
    algorithms = {}
    for oc in report.outcomes:
        cfg = dataclasses.asdict(oc.config)
        algorithms[oc.algorithm] = {
            "config": cfg,
            "best_cost": oc.result.best_cost,
            "best_starts": [int(s) for s in oc.schedule.starts],
            "breakdown": _breakdown_dict(oc.breakdown, oc.trace),
            "avg_delays": dict(zip(report.load_ids, oc.avg_delays)),
            "pct_cost_reduction": oc.pct_cost_reduction,
            "evaluations": oc.result.evaluations,
            "generations": oc.result.generations,
        }
    return {
        "scenario": report.scenario_name,
        "seed": report.seed,
        "kernel_backend": BACKEND,
        "baseline": _breakdown_dict(report.baseline, report.baseline_trace),
        "algorithms": algorithms,
    }


def _atomic_write(path: Path, data: str):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def write_report(report: ExperimentReport, path) -> Path:
    path = Path(path)
    _atomic_write(
        path, json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    )
    return path


def write_trace_csv(trace: DispatchTrace, path) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot", *DispatchTrace.FIELDS])
        for row in trace.rows():
            writer.writerow([row[0]] + [repr(v) for v in row[1:]])
    os.replace(tmp, path)
    return path


def write_convergence_csv(result: RunResult, path) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_cost", "mean_cost"])
        for gen, (best, mean) in enumerate(
            zip(result.history, result.mean_history)
        ):
            writer.writerow([gen, repr(best), repr(mean)])
    os.replace(tmp, path)
    return path


def write_sweep_csv(points: list[SweepPoint], path) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["capacity_kwh", "baseline_total", "optimized_total"])
        for pt in points:
            writer.writerow(
                [repr(pt.capacity), repr(pt.baseline_total), repr(pt.optimized_total)]
            )
    os.replace(tmp, path)
    return path
