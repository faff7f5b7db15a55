"""Packetized household loads and scheduling-delay costs.

A load draws ``packets_per_slot * packet_size`` kWh in each of
``duration_slots`` consecutive slots once started (non-preemptive). Delay is
normalized by the slack between the maximum allowable delay and the run
length, so a load started at the latest admissible slot has delay 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateLoadError, InfeasibleScheduleError, ValidationError


@dataclass(frozen=True)
class Load:
    """One schedulable appliance consuming fixed-size energy packets.

    Attributes:
        id: opaque identifier used in reports and error messages.
        arrival_slot: earliest slot the load may start.
        duration_slots: number of consecutive ON slots once started.
        packets_per_slot: packets drawn in every ON slot.
        packet_size: energy per packet, kWh.
        max_delay_slots: maximum allowable delay in slots; must exceed
            duration_slots so the normalized-delay denominator is positive.
        min_delay: lower bound on the normalized per-slot delay.
        departure_slot: declared departure time; recorded but read by no
            computation.
        max_avg_delay: upper bound on the horizon-averaged delay (QoS).
        min_packets_per_slot / max_packets_per_slot: admissible per-slot
            packet counts for schedule validation.
    """

    id: str
    arrival_slot: int
    duration_slots: int
    packets_per_slot: int
    packet_size: float
    max_delay_slots: int
    min_delay: float = 0.0
    departure_slot: int | None = None
    max_avg_delay: float = 1.0
    min_packets_per_slot: int = 0
    max_packets_per_slot: int | None = None

    def __post_init__(self):
        if self.max_packets_per_slot is None:
            object.__setattr__(self, "max_packets_per_slot", self.packets_per_slot)
        if self.arrival_slot < 0:
            raise ValidationError(f"load {self.id}: arrival_slot must be >= 0")
        if self.duration_slots < 1:
            raise ValidationError(f"load {self.id}: duration_slots must be >= 1")
        if self.packets_per_slot < 0:
            raise ValidationError(f"load {self.id}: packets_per_slot must be >= 0")
        if self.packet_size <= 0:
            raise ValidationError(f"load {self.id}: packet_size must be > 0")
        if self.max_delay_slots <= self.duration_slots:
            raise DegenerateLoadError(
                f"load {self.id}: max_delay_slots ({self.max_delay_slots}) must "
                f"exceed duration_slots ({self.duration_slots}); the normalized "
                "delay denominator would be zero"
            )
        if not 0.0 <= self.min_delay <= self.max_avg_delay:
            raise ValidationError(
                f"load {self.id}: need 0 <= min_delay <= max_avg_delay, got "
                f"min_delay={self.min_delay}, max_avg_delay={self.max_avg_delay}"
            )
        if not (
            self.min_packets_per_slot
            <= self.packets_per_slot
            <= self.max_packets_per_slot
        ):
            raise ValidationError(
                f"load {self.id}: packets_per_slot={self.packets_per_slot} outside "
                f"[{self.min_packets_per_slot}, {self.max_packets_per_slot}]"
            )

    @property
    def energy_per_slot(self) -> float:
        """kWh drawn in each ON slot."""
        return self.packets_per_slot * self.packet_size

    @property
    def delay_denominator(self) -> int:
        return self.max_delay_slots - self.duration_slots


@dataclass(frozen=True)
class DelayCostParams:
    """Linear delay-cost weight, cents per unit of normalized average delay."""

    weight: float = 0.0

    def __post_init__(self):
        if self.weight < 0:
            raise ValidationError("delay cost weight must be >= 0")


def feasible_start_bounds(load: Load, horizon: int) -> tuple[int, int]:
    """Inclusive range of start slots that respect arrival, the delay bound
    and the horizon. Raises if the load cannot run inside the horizon."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    lo = load.arrival_slot
    hi = min(lo + load.delay_denominator, horizon - load.duration_slots)
    if hi < lo:
        raise ValidationError(
            f"load {load.id}: no feasible start inside horizon {horizon} "
            f"(arrival {lo}, duration {load.duration_slots})"
        )
    return lo, hi


def total_packet_demand(loads: Iterable[Load], horizon: int) -> float:
    """Total energy (kWh) demanded by all loads over the horizon.

    Sums packets_per_slot * packet_size over every active slot of every
    load's declared (arrival-start) profile that falls inside the horizon.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    total = 0.0
    for load in loads:
        active = min(load.duration_slots, max(0, horizon - load.arrival_slot))
        total += load.packets_per_slot * load.packet_size * active
    return total


def slot_delay(load: Load, start_slot: int) -> float:
    """Normalized delay of a load started at ``start_slot``.

    Zero when the load starts at its arrival slot; 1.0 when it starts at the
    latest slot allowed by its delay bound.
    """
    if start_slot < load.arrival_slot:
        raise InfeasibleScheduleError(
            f"load {load.id}: start {start_slot} precedes arrival {load.arrival_slot}"
        )
    if start_slot == load.arrival_slot:
        return 0.0
    return (start_slot - load.arrival_slot) / load.delay_denominator


def average_delay(per_slot_delays: Sequence[float], horizon: int) -> float:
    """Horizon-averaged delay: sum of per-slot delays divided by the horizon."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    return sum(per_slot_delays) / horizon


def delay_cost(avg_delays: Sequence[float], params: DelayCostParams) -> float:
    """Aggregate delay cost in cents, linear in each load's average delay.

    The cost model only has to be non-decreasing, continuous and convex with
    a bounded derivative; the linear form is the simplest admissible choice.
    """
    return params.weight * sum(avg_delays)
