"""Roof-top PV harvest and its split between load service and storage."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class PVSpec:
    """Panel conversion parameters.

    ``temp_coeff`` (per degC) and ``reference_temp`` (degC) are fixed by the
    generation model; ``max_harvest`` is an optional scenario-level cap on
    per-slot harvest, kWh.
    """

    efficiency: float
    area: float
    temp_coeff: float = 0.005
    reference_temp: float = 25.0
    max_harvest: float | None = None

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValidationError(f"pv efficiency must be in (0, 1], got {self.efficiency}")
        if self.area <= 0:
            raise ValidationError(f"pv area must be > 0, got {self.area}")
        if self.max_harvest is not None and self.max_harvest < 0:
            raise ValidationError("pv max_harvest must be >= 0")


@dataclass(frozen=True)
class WeatherSlot:
    """Per-slot weather: irradiance integrated over the slot (kWh/m^2) and
    outdoor temperature (degC)."""

    irradiance: float
    temperature: float

    def __post_init__(self):
        if self.irradiance < 0:
            raise ValidationError(f"irradiance must be >= 0, got {self.irradiance}")


def harvest(spec: PVSpec, weather: WeatherSlot) -> float:
    """Energy harvested in one slot, kWh.

    efficiency * area * irradiance with a linear temperature derating around
    the reference temperature; clamped at zero (extreme temperatures cannot
    generate negative energy) and at the configured per-slot cap.
    """
    correction = 1.0 - spec.temp_coeff * (weather.temperature - spec.reference_temp)
    value = spec.efficiency * spec.area * weather.irradiance * correction
    if value < 0.0:
        value = 0.0
    if spec.max_harvest is not None and value > spec.max_harvest:
        value = spec.max_harvest
    return value


def split_harvest(harvest_kwh: float, scheduled_load_kwh: float) -> tuple[float, float]:
    """Split harvest into (consumed by load, storable bound).

    The load always takes PV first; the remainder is the upper bound on what
    dispatch may store this slot. consumed + storable == harvest exactly.
    """
    if harvest_kwh < 0 or scheduled_load_kwh < 0:
        raise ValidationError("harvest and load must be >= 0")
    consumed = min(scheduled_load_kwh, harvest_kwh)
    return consumed, harvest_kwh - consumed
