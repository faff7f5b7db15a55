"""Battery state evolution, action feasibility and cycle-degradation cost."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InfeasibleActionError, ValidationError

_TOL = 1e-9


@dataclass(frozen=True)
class BatterySpec:
    """Static battery limits, efficiencies and degradation shape.

    Rated charge/discharge are the per-slot depths at which a cycle costs
    exactly ``cost_scale`` cents; they default to half the per-slot limits.
    The degradation exponents (w0..w3) and cost_scale have no universal
    values; treat them as scenario-configurable defaults.
    """

    capacity_min: float
    capacity_max: float
    max_charge: float
    max_discharge: float
    decay: float = 1.0
    eff_charge: float = 0.95
    eff_discharge: float = 0.95
    rated_charge: float | None = None
    rated_discharge: float | None = None
    w0: float = 1.3
    w1: float = 0.9
    w2: float = 1.3
    w3: float = 0.9
    cost_scale: float = 1.0

    def __post_init__(self):
        if self.rated_charge is None:
            object.__setattr__(self, "rated_charge", self.max_charge / 2.0)
        if self.rated_discharge is None:
            object.__setattr__(self, "rated_discharge", self.max_discharge / 2.0)
        if not 0.0 <= self.capacity_min < self.capacity_max:
            raise ValidationError(
                f"need 0 <= capacity_min < capacity_max, got "
                f"[{self.capacity_min}, {self.capacity_max}]"
            )
        if self.max_charge <= 0 or self.max_discharge <= 0:
            raise ValidationError("per-slot charge/discharge limits must be > 0")
        if not 0.0 < self.decay <= 1.0:
            raise ValidationError(f"decay must be in (0, 1], got {self.decay}")
        if not 0.0 < self.eff_charge <= 1.0 or not 0.0 < self.eff_discharge <= 1.0:
            raise ValidationError("efficiencies must be in (0, 1]")
        if not 0.0 < self.rated_charge <= self.max_charge:
            raise ValidationError("rated_charge must be in (0, max_charge]")
        if not 0.0 < self.rated_discharge <= self.max_discharge:
            raise ValidationError("rated_discharge must be in (0, max_discharge]")
        if self.cost_scale < 0:
            raise ValidationError("cost_scale must be >= 0")


@dataclass(frozen=True)
class BatteryState:
    """Stored energy, kWh."""

    stored: float


def feasible_actions(
    spec: BatterySpec, state: BatteryState
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Admissible (charge range, discharge range) for the current state.

    Charge is limited by the per-slot cap and the remaining headroom;
    discharge by the per-slot cap and the energy above the capacity floor.
    """
    charge_hi = min(spec.max_charge, spec.capacity_max - state.stored)
    discharge_hi = min(spec.max_discharge, state.stored - spec.capacity_min)
    return (0.0, max(0.0, charge_hi)), (0.0, max(0.0, discharge_hi))


def step(
    spec: BatterySpec,
    state: BatteryState,
    charge_kwh: float,
    discharge_kwh: float,
) -> BatteryState:
    """Advance the stored energy by one slot.

    new = decay * stored + eff_charge * charge - eff_discharge * discharge.
    Simultaneous charge and discharge is rejected, as is any action outside
    the feasible ranges or one that would leave the state out of bounds.
    """
    (c_lo, c_hi), (d_lo, d_hi) = feasible_actions(spec, state)
    if charge_kwh < c_lo - _TOL or charge_kwh > c_hi + _TOL:
        raise InfeasibleActionError(
            f"charge {charge_kwh} outside [{c_lo}, {c_hi}] at state {state.stored}"
        )
    if discharge_kwh < d_lo - _TOL or discharge_kwh > d_hi + _TOL:
        raise InfeasibleActionError(
            f"discharge {discharge_kwh} outside [{d_lo}, {d_hi}] at state {state.stored}"
        )
    if charge_kwh > 0.0 and discharge_kwh > 0.0:
        raise InfeasibleActionError("simultaneous charge and discharge is prohibited")
    new = (
        spec.decay * state.stored
        + spec.eff_charge * charge_kwh
        - spec.eff_discharge * discharge_kwh
    )
    if new < spec.capacity_min - _TOL or new > spec.capacity_max + _TOL:
        raise InfeasibleActionError(
            f"resulting state {new} outside [{spec.capacity_min}, {spec.capacity_max}]"
        )
    return BatteryState(min(max(new, spec.capacity_min), spec.capacity_max))


def degradation_cost(
    spec: BatterySpec, charge_kwh: float, discharge_kwh: float
) -> float:
    """Cycle-degradation cost of one slot's activity, cents.

    Each active direction contributes
    cost_scale * (rated / actual)^w * exp(w' * (actual / rated - 1)),
    which equals cost_scale exactly at rated depth. Idle directions
    contribute nothing, so the ratio is never evaluated at zero.
    """
    if charge_kwh < 0 or discharge_kwh < 0:
        raise ValidationError("charge/discharge must be >= 0")
    cost = 0.0
    if charge_kwh > 0.0:
        ratio = charge_kwh / spec.rated_charge
        cost += (
            spec.cost_scale
            * (spec.rated_charge / charge_kwh) ** spec.w0
            * math.exp(spec.w1 * (ratio - 1.0))
        )
    if discharge_kwh > 0.0:
        ratio = discharge_kwh / spec.rated_discharge
        cost += (
            spec.cost_scale
            * (spec.rated_discharge / discharge_kwh) ** spec.w2
            * math.exp(spec.w3 * (ratio - 1.0))
        )
    return cost


def average_degradation_cost(per_slot: Sequence[float], horizon: int) -> float:
    """Mean per-slot degradation cost over the horizon, cents."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    return sum(per_slot) / horizon
