"""Packetized energy management controller (P-EMC) simulator and optimizer.

Discrete-time simulation of a grid-connected smart home with PV and battery
storage: packetized loads with delay costs, internal demand/supply pricing,
battery degradation, a deterministic dispatch rule, and GA/BPSO/DE schedule
optimizers. The per-slot dispatch loop runs on a compiled kernel when
available (see ``pemc.KERNEL_BACKEND``).
"""

from ._engine import BACKEND as KERNEL_BACKEND
from .dispatch import (
    CostBreakdown,
    DispatchTrace,
    ScheduleMatrix,
    decode_schedule,
    dispatch,
    evaluate,
    schedule_from_starts,
    simulate,
)
from .errors import (
    DegenerateLoadError,
    InfeasibleActionError,
    InfeasibleScheduleError,
    PemcError,
    ScenarioParseError,
    SearchSpaceError,
    SeriesLengthError,
    ValidationError,
)
from .experiment import (
    ExperimentReport,
    run_baseline,
    run_capacity_sweep,
    run_experiment,
    write_report,
)
from .loads import (
    DelayCostParams,
    Load,
    average_delay,
    delay_cost,
    feasible_start_bounds,
    slot_delay,
    total_packet_demand,
)
from .optimizers import (
    OptimizerConfig,
    RunResult,
    ScheduleObjective,
    bpso_run,
    de_run,
    exhaustive_oracle,
    ga_run,
)
from .pricing import (
    TariffSlot,
    TransactionRecord,
    average_transaction_cost,
    internal_buy_price,
    internal_sell_price,
    slot_transaction,
    validate_schedule_constraints,
    zone_ds_ratio,
)
from .pv import PVSpec, WeatherSlot, harvest, split_harvest
from .scenario import Scenario, example_scenario_path, load_scenario
from .storage import (
    BatterySpec,
    BatteryState,
    average_degradation_cost,
    degradation_cost,
    feasible_actions,
    step,
)

__version__ = "0.1.0"
