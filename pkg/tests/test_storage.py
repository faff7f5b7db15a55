import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pemc.errors import InfeasibleActionError, ValidationError
from pemc.storage import (
    BatterySpec,
    BatteryState,
    average_degradation_cost,
    degradation_cost,
    feasible_actions,
    step,
)


def make_spec(**kw):
    base = dict(
        capacity_min=2.0,
        capacity_max=12.0,
        max_charge=5.0,
        max_discharge=5.0,
        decay=1.0,
        eff_charge=0.95,
        eff_discharge=0.95,
    )
    base.update(kw)
    return BatterySpec(**base)


class TestSpecValidation:
    def test_inverted_capacities_rejected(self):
        with pytest.raises(ValidationError):
            make_spec(capacity_min=5.0, capacity_max=5.0)

    def test_rated_defaults_to_half_limit(self):
        spec = make_spec()
        assert spec.rated_charge == 2.5
        assert spec.rated_discharge == 2.5

    def test_rated_above_limit_rejected(self):
        with pytest.raises(ValidationError):
            make_spec(rated_charge=6.0)

    def test_bad_decay_rejected(self):
        with pytest.raises(ValidationError):
            make_spec(decay=0.0)


class TestFeasibleActions:
    def test_full_battery_cannot_charge(self):
        spec = make_spec()
        (lo, hi), _ = feasible_actions(spec, BatteryState(12.0))
        assert (lo, hi) == (0.0, 0.0)

    def test_discharge_limited_by_rate(self):
        spec = make_spec()
        _, (lo, hi) = feasible_actions(spec, BatteryState(10.0))
        assert (lo, hi) == (0.0, 5.0)

    def test_charge_limited_by_headroom(self):
        spec = make_spec()
        (lo, hi), _ = feasible_actions(spec, BatteryState(10.0))
        assert (lo, hi) == (0.0, 2.0)


class TestStep:
    def test_idle_is_identity(self):
        spec = make_spec()
        assert step(spec, BatteryState(5.0), 0.0, 0.0).stored == 5.0

    def test_charge_scaled_by_efficiency(self):
        spec = make_spec(capacity_min=0.0)
        new = step(spec, BatteryState(5.0), 2.0, 0.0)
        assert new.stored == pytest.approx(6.9, rel=1e-9)

    def test_decay_and_discharge(self):
        spec = make_spec(
            capacity_min=0.0, decay=0.99, eff_discharge=1.0
        )
        new = step(spec, BatteryState(10.0), 0.0, 1.0)
        assert new.stored == pytest.approx(8.9, rel=1e-9)

    def test_out_of_range_action_rejected(self):
        spec = make_spec()
        with pytest.raises(InfeasibleActionError):
            step(spec, BatteryState(11.0), 3.0, 0.0)

    def test_simultaneous_charge_discharge_rejected(self):
        spec = make_spec()
        with pytest.raises(InfeasibleActionError):
            step(spec, BatteryState(5.0), 1.0, 1.0)

    @given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 10**6))
    def test_conservation_with_unit_efficiency(self, f_charge, f_discharge, seed):
        spec = make_spec(eff_charge=1.0, eff_discharge=1.0)
        state = BatteryState(7.0)
        (c_lo, c_hi), (d_lo, d_hi) = feasible_actions(spec, state)
        if seed % 2:
            charge, discharge = f_charge * c_hi, 0.0
        else:
            charge, discharge = 0.0, f_discharge * d_hi
        new = step(spec, state, charge, discharge)
        assert new.stored - state.stored == pytest.approx(
            charge - discharge, abs=1e-9
        )


class TestTrajectoryBounds:
    def test_random_feasible_sequences_stay_in_bounds(self):
        spec = make_spec()
        rng = np.random.default_rng(11)
        for _ in range(200):
            state = BatteryState(float(rng.uniform(2.0, 12.0)))
            for _ in range(24):
                (c_lo, c_hi), (d_lo, d_hi) = feasible_actions(spec, state)
                u = rng.random()
                if u < 0.4:
                    state = step(spec, state, float(rng.uniform(c_lo, c_hi)), 0.0)
                elif u < 0.8:
                    state = step(spec, state, 0.0, float(rng.uniform(d_lo, d_hi)))
                else:
                    state = step(spec, state, 0.0, 0.0)
                assert spec.capacity_min <= state.stored <= spec.capacity_max


class TestDegradationCost:
    def test_rated_charge_costs_scale(self):
        spec = make_spec(cost_scale=1.7)
        assert degradation_cost(spec, spec.rated_charge, 0.0) == pytest.approx(
            1.7, rel=1e-9
        )

    def test_idle_slot_free(self):
        assert degradation_cost(make_spec(), 0.0, 0.0) == 0.0

    def test_half_rated_example(self):
        spec = make_spec(
            max_charge=2.0, rated_charge=2.0, w0=1.3, w1=0.9, cost_scale=1.0
        )
        expected = 2.0**1.3 * math.exp(-0.45)
        cost = degradation_cost(spec, 1.0, 0.0)
        assert cost == pytest.approx(expected, rel=1e-9)
        assert cost == pytest.approx(1.5700, rel=1e-4)

    def test_negative_activity_rejected(self):
        with pytest.raises(ValidationError):
            degradation_cost(make_spec(), -0.5, 0.0)

    def test_shape_dips_then_rises(self):
        # high for shallow cycles, minimal somewhere below rated ratio 1/w
        # behaviour, rising again for deep cycles
        spec = make_spec()
        grid = np.linspace(0.05, spec.max_charge, 200)
        costs = [degradation_cost(spec, c, 0.0) for c in grid]
        m = int(np.argmin(costs))
        assert 0 < m < len(grid) - 1
        assert all(a >= b - 1e-12 for a, b in zip(costs[: m + 1], costs[1 : m + 1]))
        assert all(b >= a - 1e-12 for a, b in zip(costs[m:], costs[m + 1 :]))

    @given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
    def test_positive_for_any_activity(self, charge, discharge):
        spec = make_spec()
        assert degradation_cost(spec, charge, 0.0) > 0
        assert degradation_cost(spec, 0.0, discharge) > 0
        both = degradation_cost(spec, charge, discharge)
        assert both == pytest.approx(
            degradation_cost(spec, charge, 0.0)
            + degradation_cost(spec, 0.0, discharge),
            rel=1e-12,
        )


class TestAverageDegradation:
    def test_all_idle(self):
        assert average_degradation_cost([0.0] * 8, 8) == 0.0

    def test_mean(self):
        assert average_degradation_cost([2.0, 0.0, 0.0, 2.0], 4) == pytest.approx(
            1.0, rel=1e-9
        )

    def test_identity(self):
        assert average_degradation_cost([3.5], 1) == pytest.approx(3.5)
