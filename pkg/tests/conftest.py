import numpy as np
import pytest
from hypothesis import settings

from pemc.loads import DelayCostParams, Load
from pemc.pricing import TariffSlot
from pemc.pv import PVSpec, WeatherSlot
from pemc.scenario import Scenario, example_scenario_path, load_scenario
from pemc.storage import BatterySpec, BatteryState

settings.register_profile("ci", deadline=None, max_examples=100)
settings.load_profile("ci")


def make_scenario(
    loads,
    tariffs,
    weather,
    battery=None,
    initial_kwh=0.0,
    pv=None,
    delay_weight=0.0,
    feed_in_cap=5.0,
    penalty_coeff=1e4,
    grid_charge_price_threshold=0.0,
    min_battery_activity=0.0,
    name="test",
    **kwargs,
):
    """Hand-built scenario with an inert battery and no grid charging unless
    overridden."""
    horizon = len(tariffs)
    if battery is None:
        battery = BatterySpec(
            capacity_min=0.0, capacity_max=1.0, max_charge=1.0, max_discharge=1.0
        )
    if pv is None:
        pv = PVSpec(efficiency=0.18, area=0.5)
    sc = Scenario(
        name=name,
        horizon=horizon,
        slot_hours=1.0,
        loads=list(loads),
        tariffs=list(tariffs),
        weather=list(weather),
        pv=pv,
        battery=battery,
        initial_state=BatteryState(initial_kwh),
        delay_params=DelayCostParams(delay_weight),
        feed_in_cap=feed_in_cap,
        penalty_coeff=penalty_coeff,
        grid_charge_price_threshold=grid_charge_price_threshold,
        min_battery_activity=min_battery_activity,
        **kwargs,
    )
    return sc.validate()


def two_slot_scenario(delay_weight=0.1):
    """Hand-computable 2-slot instance: one 1 kWh load, no PV, inert battery,
    price 1.0 then 0.5 cents/kWh bought at the utility rate (ds_ratio 0)."""
    load = Load(
        id="unit",
        arrival_slot=0,
        duration_slots=1,
        packets_per_slot=2,
        packet_size=0.5,
        max_delay_slots=3,
    )
    tariffs = [TariffSlot(1.0, 0.5, 0.0), TariffSlot(0.5, 0.25, 0.0)]
    weather = [WeatherSlot(0.0, 25.0), WeatherSlot(0.0, 25.0)]
    return make_scenario([load], tariffs, weather, delay_weight=delay_weight)


def random_small_scenario(seed) -> Scenario:
    """Random oracle-sized instance: horizon <= 8, up to 3 loads, at most 6
    feasible starts per load (schedule space <= 216)."""
    rng = np.random.default_rng(seed)
    horizon = int(rng.integers(6, 9))
    n_loads = int(rng.integers(1, 4))
    loads = []
    for i in range(n_loads):
        duration = int(rng.integers(1, 3))
        arrival = int(rng.integers(0, horizon - duration + 1))
        span = int(rng.integers(0, 6))
        loads.append(
            Load(
                id=f"l{i}",
                arrival_slot=arrival,
                duration_slots=duration,
                packets_per_slot=int(rng.integers(1, 5)),
                packet_size=float(rng.choice([0.25, 0.5])),
                max_delay_slots=duration + max(1, span),
                max_avg_delay=1.0,
            )
        )
    tariffs = []
    for _ in range(horizon):
        buy = float(rng.uniform(0.6, 3.7))
        sell = float(rng.uniform(0.06, min(0.57, buy)))
        tariffs.append(TariffSlot(buy, sell, float(rng.uniform(0.0, 1.2))))
    weather = [
        WeatherSlot(float(rng.uniform(0.0, 30.0)), float(rng.uniform(10.0, 35.0)))
        for _ in range(horizon)
    ]
    cap = float(rng.uniform(2.0, 10.0))
    battery = BatterySpec(
        capacity_min=0.0,
        capacity_max=cap,
        max_charge=float(rng.uniform(1.0, 4.0)),
        max_discharge=float(rng.uniform(1.0, 4.0)),
    )
    return make_scenario(
        loads,
        tariffs,
        weather,
        battery=battery,
        initial_kwh=float(rng.uniform(0.0, cap)),
        delay_weight=float(rng.uniform(0.0, 1.0)),
        feed_in_cap=float(rng.uniform(2.0, 6.0)),
        grid_charge_price_threshold=None,
        min_battery_activity=None,
        name=f"rand{seed}",
    )


@pytest.fixture(scope="session")
def example_scenario():
    return load_scenario(example_scenario_path())
