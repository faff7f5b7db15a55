import dataclasses
import json

import pytest

from conftest import make_scenario
from pemc.errors import ValidationError
from pemc.experiment import (
    report_to_dict,
    run_baseline,
    run_capacity_sweep,
    run_experiment,
    write_convergence_csv,
    write_report,
    write_sweep_csv,
    write_trace_csv,
)
from pemc.loads import Load
from pemc.optimizers import OptimizerConfig
from pemc.pricing import TariffSlot
from pemc.pv import WeatherSlot

FAST = dict(population_size=16, max_generations=30, stall_generations=10)


class TestBaseline:
    def test_baseline_delay_cost_is_zero(self, example_scenario):
        br = run_baseline(example_scenario)
        assert br.delay_cost == 0.0

    def test_zero_load_scenario(self):
        sc = make_scenario(
            loads=[],
            tariffs=[TariffSlot(1.0, 0.5, 0.0)] * 2,
            weather=[WeatherSlot(0.0, 25.0)] * 2,
        )
        br = run_baseline(sc)
        assert br.delay_cost == 0.0
        assert br.transaction_cost == 0.0

    def test_flat_prices_make_baseline_optimal(self):
        # nothing to gain from shifting: delays only add cost
        load = Load(
            id="l", arrival_slot=0, duration_slots=1, packets_per_slot=2,
            packet_size=0.5, max_delay_slots=4,
        )
        sc = make_scenario(
            loads=[load],
            tariffs=[TariffSlot(1.0, 0.5, 0.0)] * 4,
            weather=[WeatherSlot(0.0, 25.0)] * 4,
            delay_weight=0.5,
        )
        base = run_baseline(sc)
        report = run_experiment(
            sc, [OptimizerConfig(algorithm="ga", **FAST)], seed=1
        )
        assert report.outcomes[0].breakdown.total == pytest.approx(
            base.total, rel=1e-12
        )


class TestRunExperiment:
    def test_empty_config_list_rejected(self, example_scenario):
        with pytest.raises(ValidationError):
            run_experiment(example_scenario, [], seed=0)

    def test_all_algorithms_never_worse_than_baseline(self, example_scenario):
        configs = [
            OptimizerConfig(algorithm=a, **FAST) for a in ("ga", "bpso", "de")
        ]
        report = run_experiment(example_scenario, configs, seed=11)
        assert len(report.outcomes) == 3
        for oc in report.outcomes:
            assert oc.breakdown.total <= report.baseline.total + 1e-12
            assert oc.pct_cost_reduction >= -1e-12

    def test_deterministic_report_dict(self, example_scenario):
        configs = [OptimizerConfig(algorithm="ga", **FAST)]
        d1 = report_to_dict(run_experiment(example_scenario, configs, seed=5))
        d2 = report_to_dict(
            run_experiment(
                example_scenario,
                [OptimizerConfig(algorithm="ga", **FAST)],
                seed=5,
            )
        )
        assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)

    def test_report_totals_reconcile(self, example_scenario):
        report = run_experiment(
            example_scenario, [OptimizerConfig(algorithm="de", **FAST)], seed=2
        )
        for oc in report.outcomes:
            parts = (
                oc.breakdown.delay_cost
                + oc.breakdown.transaction_cost
                + oc.breakdown.degradation_cost
                + oc.breakdown.penalty
            )
            assert oc.breakdown.total == pytest.approx(parts, abs=1e-6)
        doc = report_to_dict(report)
        assert "wall_time" not in json.dumps(doc)

    def test_optimizers_cut_buying_and_raise_selling(self, example_scenario):
        configs = [
            OptimizerConfig(algorithm=a, **FAST) for a in ("ga", "bpso", "de")
        ]
        report = run_experiment(example_scenario, configs, seed=42)
        for oc in report.outcomes:
            assert oc.trace.buy_cents < report.baseline_trace.buy_cents
            assert oc.trace.sell_cents > report.baseline_trace.sell_cents

    def test_config_seed_overrides_spawned_stream(self, example_scenario):
        cfg = OptimizerConfig(algorithm="ga", seed=99, **FAST)
        r1 = run_experiment(example_scenario, [cfg], seed=1)
        r2 = run_experiment(
            example_scenario,
            [OptimizerConfig(algorithm="ga", seed=99, **FAST)],
            seed=2,
        )
        assert (
            r1.outcomes[0].result.history == r2.outcomes[0].result.history
        )


class TestCapacitySweep:
    def test_rows_and_order(self, example_scenario):
        pts = run_capacity_sweep(
            example_scenario,
            [5.0, 10.0, 20.0],
            OptimizerConfig(algorithm="ga", **FAST),
            seed=4,
        )
        assert [p.capacity for p in pts] == [5.0, 10.0, 20.0]
        for p in pts:
            assert p.optimized_total <= p.baseline_total + 1e-12

    def test_single_capacity(self, example_scenario):
        pts = run_capacity_sweep(
            example_scenario, [10.0], OptimizerConfig(algorithm="ga", **FAST)
        )
        assert len(pts) == 1

    def test_non_increasing_list_rejected(self, example_scenario):
        with pytest.raises(ValidationError):
            run_capacity_sweep(
                example_scenario,
                [10.0, 10.0],
                OptimizerConfig(algorithm="ga", **FAST),
            )

    def test_capacity_below_floor_rejected(self, example_scenario):
        sc = dataclasses.replace(
            example_scenario,
            battery=dataclasses.replace(example_scenario.battery, capacity_min=3.0),
            _prepared=None,
        )
        with pytest.raises(ValidationError):
            run_capacity_sweep(
                sc, [2.0, 10.0], OptimizerConfig(algorithm="ga", **FAST)
            )


class TestWriters:
    def test_report_file_roundtrip(self, example_scenario, tmp_path):
        report = run_experiment(
            example_scenario, [OptimizerConfig(algorithm="ga", **FAST)], seed=3
        )
        path = write_report(report, tmp_path / "report.json")
        doc = json.loads(path.read_text())
        assert doc["scenario"] == "example_day"
        assert doc["seed"] == 3
        assert "ga" in doc["algorithms"]
        assert doc["baseline"]["total"] == pytest.approx(
            report.baseline.total, rel=1e-15
        )

    def test_trace_csv_shape(self, example_scenario, tmp_path):
        report = run_experiment(
            example_scenario, [OptimizerConfig(algorithm="ga", **FAST)], seed=3
        )
        path = write_trace_csv(report.baseline_trace, tmp_path / "trace.csv")
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + example_scenario.horizon
        assert lines[0].startswith("slot,grid_to_battery,pv_to_load")

    def test_convergence_csv(self, example_scenario, tmp_path):
        report = run_experiment(
            example_scenario, [OptimizerConfig(algorithm="ga", **FAST)], seed=3
        )
        result = report.outcomes[0].result
        path = write_convergence_csv(result, tmp_path / "conv.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "generation,best_cost,mean_cost"
        assert len(lines) == 1 + len(result.history)
        best = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(b <= a for a, b in zip(best, best[1:]))

    def test_sweep_csv(self, example_scenario, tmp_path):
        pts = run_capacity_sweep(
            example_scenario, [5.0, 10.0], OptimizerConfig(algorithm="ga", **FAST)
        )
        path = write_sweep_csv(pts, tmp_path / "sweep.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "capacity_kwh,baseline_total,optimized_total"
        assert len(lines) == 3
