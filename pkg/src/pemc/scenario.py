"""Scenario definition and ingestion.

A scenario is one JSON document (structure: loads, PV, battery, flags) that
references two CSV series by relative path: the tariff series with columns
``slot, utility_buy, utility_sell, ds_ratio`` and the weather series with
columns ``slot, irradiance, temperature``. Both must cover exactly the
scheduling horizon.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import (
    ScenarioParseError,
    SeriesLengthError,
    ValidationError,
)
from .loads import DelayCostParams, Load, feasible_start_bounds
from .pricing import TariffSlot
from .pv import PVSpec, WeatherSlot
from .storage import BatterySpec, BatteryState

_LOAD_KEYS = {
    "id": "id",
    "arrival_slot": "arrival_slot",
    "duration_slots": "duration_slots",
    "packets_per_slot": "packets_per_slot",
    "packet_size_kwh": "packet_size",
    "max_delay_slots": "max_delay_slots",
    "min_delay": "min_delay",
    "departure_slot": "departure_slot",
    "max_avg_delay": "max_avg_delay",
    "min_packets_per_slot": "min_packets_per_slot",
    "max_packets_per_slot": "max_packets_per_slot",
}

_BATTERY_KEYS = {
    "capacity_min_kwh": "capacity_min",
    "capacity_max_kwh": "capacity_max",
    "max_charge_kwh": "max_charge",
    "max_discharge_kwh": "max_discharge",
    "decay": "decay",
    "eff_charge": "eff_charge",
    "eff_discharge": "eff_discharge",
    "rated_charge_kwh": "rated_charge",
    "rated_discharge_kwh": "rated_discharge",
    "w0": "w0",
    "w1": "w1",
    "w2": "w2",
    "w3": "w3",
    "cost_scale_cents": "cost_scale",
}


@dataclass(eq=False)
class Scenario:
    """Fully validated simulation inputs for one scheduling horizon."""

    name: str
    horizon: int
    slot_hours: float
    loads: list[Load]
    tariffs: list[TariffSlot]
    weather: list[WeatherSlot]
    pv: PVSpec
    battery: BatterySpec
    initial_state: BatteryState
    delay_params: DelayCostParams
    feed_in_cap: float
    penalty_coeff: float = 1e4
    grid_charge_price_threshold: float | None = None
    min_battery_activity: float | None = None
    swap_transaction_prices: bool = False
    literal_tx_sign: bool = False
    _prepared: object = field(default=None, repr=False, compare=False)

    def validate(self):
        if self.horizon < 1:
            raise ValidationError("horizon_slots must be >= 1")
        if self.slot_hours <= 0:
            raise ValidationError("slot_hours must be > 0")
        if len(self.tariffs) != self.horizon:
            raise SeriesLengthError(
                f"tariff series has {len(self.tariffs)} rows, horizon is {self.horizon}"
            )
        if len(self.weather) != self.horizon:
            raise SeriesLengthError(
                f"weather series has {len(self.weather)} rows, horizon is {self.horizon}"
            )
        for load in self.loads:
            if load.arrival_slot + load.duration_slots > self.horizon:
                raise ValidationError(
                    f"loads[{load.id}]: arrival {load.arrival_slot} + duration "
                    f"{load.duration_slots} exceeds horizon {self.horizon}"
                )
            feasible_start_bounds(load, self.horizon)
        if not (
            self.battery.capacity_min
            <= self.initial_state.stored
            <= self.battery.capacity_max
        ):
            raise ValidationError(
                f"battery.initial_kwh {self.initial_state.stored} outside "
                f"[{self.battery.capacity_min}, {self.battery.capacity_max}]"
            )
        if self.feed_in_cap < 0:
            raise ValidationError("feed_in_cap_kwh must be >= 0")
        if self.penalty_coeff < 0:
            raise ValidationError("penalty_coeff must be >= 0")
        if self.min_battery_activity is not None and self.min_battery_activity < 0:
            raise ValidationError("min_battery_activity_kwh must be >= 0")
        return self


def example_scenario_path() -> Path:
    """Path of the bundled 24-slot example scenario."""
    return Path(resources.files("pemc.data") / "example_day.json")


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise ScenarioParseError(f"{context}: missing required field '{key}'")
    return doc[key]


def _mapped_kwargs(doc: dict, mapping: dict, context: str, required: set) -> dict:
    kwargs = {}
    for json_key, attr in mapping.items():
        if json_key in doc:
            kwargs[attr] = doc[json_key]
        elif json_key in required:
            raise ScenarioParseError(f"{context}: missing required field '{json_key}'")
    return kwargs


def _read_series(path: Path, columns: list[str], horizon: int):
    """Yield per-row dicts of parsed floats, enforcing slot order and length."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ScenarioParseError(f"cannot open series file {path}: {exc}") from exc
    rows = []
    with fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [c for c in columns if c not in names]
        if missing:
            raise ScenarioParseError(
                f"{path}: missing column(s) {', '.join(missing)}"
            )
        for line_no, row in enumerate(reader, start=2):
            parsed = {}
            for col in columns:
                try:
                    parsed[col] = float(row[col])
                except (TypeError, ValueError):
                    raise ScenarioParseError(
                        f"{path}:{line_no}: column '{col}' is not a number: {row[col]!r}"
                    ) from None
            expected_slot = len(rows)
            if int(parsed["slot"]) != expected_slot:
                raise ScenarioParseError(
                    f"{path}:{line_no}: expected slot {expected_slot}, got {parsed['slot']:g}"
                )
            parsed["_line"] = line_no
            rows.append(parsed)
    if len(rows) != horizon:
        raise SeriesLengthError(
            f"{path}: has {len(rows)} data rows, horizon is {horizon}"
        )
    return rows


def load_scenario(path) -> Scenario:
    """Parse and fully validate a scenario file.

    Raises ScenarioParseError for malformed documents, SeriesLengthError for
    series that do not cover the horizon, and ValidationError (with the
    offending field path) for invariant violations.
    """
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioParseError(f"cannot open scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError(f"{path}: top-level value must be an object")

    context = str(path)
    horizon = int(_require(doc, "horizon_slots", context))
    base = path.parent

    loads = []
    for i, entry in enumerate(_require(doc, "loads", context)):
        load_ctx = f"{context}: loads[{i}]"
        kwargs = _mapped_kwargs(
            entry,
            _LOAD_KEYS,
            load_ctx,
            required={
                "id",
                "arrival_slot",
                "duration_slots",
                "packets_per_slot",
                "packet_size_kwh",
                "max_delay_slots",
            },
        )
        try:
            loads.append(Load(**kwargs))
        except ValidationError as exc:
            raise type(exc)(f"loads[{i}]: {exc}") from None

    pv_doc = _require(doc, "pv", context)
    try:
        pv = PVSpec(
            efficiency=_require(pv_doc, "efficiency", f"{context}: pv"),
            area=_require(pv_doc, "area_m2", f"{context}: pv"),
            max_harvest=pv_doc.get("max_harvest_kwh"),
        )
    except ValidationError as exc:
        raise type(exc)(f"pv: {exc}") from None

    bat_doc = _require(doc, "battery", context)
    bat_kwargs = _mapped_kwargs(
        bat_doc,
        _BATTERY_KEYS,
        f"{context}: battery",
        required={
            "capacity_min_kwh",
            "capacity_max_kwh",
            "max_charge_kwh",
            "max_discharge_kwh",
        },
    )
    try:
        battery = BatterySpec(**bat_kwargs)
    except ValidationError as exc:
        raise type(exc)(f"battery: {exc}") from None
    initial = BatteryState(float(bat_doc.get("initial_kwh", battery.capacity_min)))

    tariff_rows = _read_series(
        base / _require(doc, "tariff_csv", context),
        ["slot", "utility_buy", "utility_sell", "ds_ratio"],
        horizon,
    )
    tariffs = []
    for row in tariff_rows:
        try:
            tariffs.append(
                TariffSlot(row["utility_buy"], row["utility_sell"], row["ds_ratio"])
            )
        except ValidationError as exc:
            raise type(exc)(f"tariff row at line {row['_line']}: {exc}") from None

    weather_rows = _read_series(
        base / _require(doc, "weather_csv", context),
        ["slot", "irradiance", "temperature"],
        horizon,
    )
    weather = []
    for row in weather_rows:
        try:
            weather.append(WeatherSlot(row["irradiance"], row["temperature"]))
        except ValidationError as exc:
            raise type(exc)(f"weather row at line {row['_line']}: {exc}") from None

    try:
        delay_params = DelayCostParams(float(doc.get("delay_cost_weight", 0.0)))
    except ValidationError as exc:
        raise type(exc)(f"delay_cost_weight: {exc}") from None

    threshold = doc.get("grid_charge_price_threshold")
    min_activity = doc.get("min_battery_activity_kwh")
    scenario = Scenario(
        name=str(doc.get("name", path.stem)),
        horizon=horizon,
        slot_hours=float(doc.get("slot_hours", 1.0)),
        loads=loads,
        tariffs=tariffs,
        weather=weather,
        pv=pv,
        battery=battery,
        initial_state=initial,
        delay_params=delay_params,
        feed_in_cap=float(_require(doc, "feed_in_cap_kwh", context)),
        penalty_coeff=float(doc.get("penalty_coeff", 1e4)),
        grid_charge_price_threshold=None if threshold is None else float(threshold),
        min_battery_activity=None if min_activity is None else float(min_activity),
        swap_transaction_prices=bool(doc.get("swap_transaction_prices", False)),
        literal_tx_sign=bool(doc.get("literal_tx_sign", False)),
    )
    return scenario.validate()
