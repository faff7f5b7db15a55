"""Internal energy-packet pricing and transaction accounting.

The service provider interpolates its internal prices between the utility's
feed-in price and retail price based on the sharing zone's demand-and-supply
ratio. Prosumers buy residual deficits at the internal selling price and are
paid the internal buying price for exported surplus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .loads import Load, total_packet_demand

_EPS = 1e-12


@dataclass(frozen=True)
class TariffSlot:
    """Utility prices and zone demand-and-supply ratio for one slot.

    utility_buy and utility_sell are the utility's retail and feed-in prices
    in cents/kWh; ds_ratio is the zone's supply-to-demand ratio (>= 0).
    """

    utility_buy: float
    utility_sell: float
    ds_ratio: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.utility_sell <= self.utility_buy:
            raise ValidationError(
                f"need 0 < utility_sell <= utility_buy, got sell="
                f"{self.utility_sell}, buy={self.utility_buy}"
            )
        if self.ds_ratio < 0:
            raise ValidationError(f"ds_ratio must be >= 0, got {self.ds_ratio}")


@dataclass(frozen=True)
class TransactionRecord:
    """Per-slot energy trade: at most one of bought/sold is nonzero."""

    slot: int
    bought_kwh: float = 0.0
    sold_kwh: float = 0.0
    buy_cost: float = 0.0
    sell_revenue: float = 0.0


def internal_sell_price(slot: TariffSlot) -> float:
    """Internal selling price (what prosumers pay per kWh bought), cents/kWh.

    For ds_ratio in [0, 1] the price interpolates hyperbolically from
    utility_buy (ratio 0, everything procured from the utility) down to
    utility_sell (ratio 1, pure surplus); beyond 1 it stays at utility_sell.
    """
    r = slot.ds_ratio
    if r > 1.0:
        return slot.utility_sell
    num = slot.utility_sell * slot.utility_buy
    den = (slot.utility_buy - slot.utility_sell) * r + slot.utility_sell
    return num / den


def internal_buy_price(slot: TariffSlot, p_sell: float) -> float:
    """Internal buying price (what prosumers are paid per kWh sold), cents/kWh.

    Convex combination of the internal selling price and the utility retail
    price for ds_ratio in [0, 1]; equals utility_sell beyond 1.
    """
    r = slot.ds_ratio
    if r > 1.0:
        return slot.utility_sell
    return p_sell * r + slot.utility_buy * (1.0 - r)


def zone_ds_ratio(surplus_kwh: float, deficit_kwh: float) -> float:
    """Derived demand-and-supply ratio: offered surplus over requested deficit.

    Zero-deficit slots report 1.0 (surplus regime) so single-home scenarios
    stay well defined.
    """
    if surplus_kwh < 0 or deficit_kwh < 0:
        raise ValidationError("zone surplus/deficit must be >= 0")
    if deficit_kwh <= 0:
        return 1.0
    return surplus_kwh / deficit_kwh


def slot_transaction(
    load_kwh: float,
    pv_kwh: float,
    storage_kwh: float,
    prices: tuple[float, float],
    slot: int = 0,
) -> TransactionRecord:
    """Settle one slot: buy the deficit or sell the surplus, never both.

    ``storage_kwh`` is the energy the battery actually delivers this slot
    (after discharge efficiency), not the full stored amount. ``prices`` is
    (internal sell price, internal buy price); deficits are bought at the
    selling price and surpluses paid at the buying price.
    """
    if load_kwh < 0 or pv_kwh < 0 or storage_kwh < 0:
        raise ValidationError("slot energies must be >= 0")
    p_sell, p_buy = prices
    supply = pv_kwh + storage_kwh
    if load_kwh > supply:
        deficit = load_kwh - supply
        return TransactionRecord(
            slot, bought_kwh=deficit, buy_cost=p_sell * deficit
        )
    if supply > load_kwh:
        surplus = supply - load_kwh
        return TransactionRecord(
            slot, sold_kwh=surplus, sell_revenue=p_buy * surplus
        )
    return TransactionRecord(slot)


def average_transaction_cost(
    records: Iterable[TransactionRecord], horizon: int
) -> float:
    """Mean net transaction value over the horizon, cents.

    Positive means net revenue (sell minus buy). The dispatch objective
    negates this so that minimizing reduces net expenditure.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    return sum(r.sell_revenue - r.buy_cost for r in records) / horizon


@dataclass
class ScheduleViolationReport:
    """Constraint violations of a schedule against its declared loads.

    Magnitudes are kWh. ``demand_gap`` is the absolute difference between
    scheduled and declared total demand; the two lists carry
    (load id, slot, magnitude) tuples.
    """

    demand_gap: float = 0.0
    bound_violations: list[tuple[str, int, float]] = field(default_factory=list)
    feed_in_violations: list[tuple[str, int, float]] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return (
            self.demand_gap <= _EPS
            and not self.bound_violations
            and not self.feed_in_violations
        )

    def total_magnitude(self) -> float:
        return (
            self.demand_gap
            + sum(v for _, _, v in self.bound_violations)
            + sum(v for _, _, v in self.feed_in_violations)
        )


def validate_schedule_constraints(
    schedule, loads: Sequence[Load], feed_in_cap: float
) -> ScheduleViolationReport:
    """Check demand conservation, per-slot bounds and the feed-in cap.

    ``schedule`` is a ScheduleMatrix or a binary (loads x horizon) array.
    Per-slot bounds apply to served slots only; the feed-in check compares
    each load's declared arrival-start profile against its scheduled slots,
    flagging vacated energy beyond ``feed_in_cap``.
    """
    bits = np.asarray(getattr(schedule, "bits", schedule))
    if bits.ndim != 2 or bits.shape[0] != len(loads):
        raise ValidationError(
            f"schedule shape {bits.shape} does not match {len(loads)} loads"
        )
    horizon = bits.shape[1]
    report = ScheduleViolationReport()

    scheduled_total = 0.0
    for i, load in enumerate(loads):
        e_slot = load.energy_per_slot
        lo_bound = load.min_packets_per_slot * load.packet_size
        hi_bound = load.max_packets_per_slot * load.packet_size
        profile_end = min(load.arrival_slot + load.duration_slots, horizon)
        for t in range(horizon):
            x = e_slot if bits[i, t] else 0.0
            scheduled_total += x
            if x > 0.0:
                excess = max(lo_bound - x, x - hi_bound)
                if excess > _EPS:
                    report.bound_violations.append((load.id, t, excess))
            profile = e_slot if load.arrival_slot <= t < profile_end else 0.0
            vacated = profile - x - feed_in_cap
            if vacated > _EPS:
                report.feed_in_violations.append((load.id, t, vacated))

    gap = abs(scheduled_total - total_packet_demand(loads, horizon))
    if gap > _EPS:
        report.demand_gap = gap
    return report
