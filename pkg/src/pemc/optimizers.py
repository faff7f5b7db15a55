"""Population-based schedule optimizers: GA, BPSO and DE.

All three search flat genomes of length loads x horizon; every candidate is
decoded (and repaired) to a valid schedule before costing, so the search
space is effectively the set of per-load start slots. Costs are memoized by
decoded start tuple because many genomes collapse to the same schedule.

Randomness: each run consumes a single numpy PCG64 stream. Experiment
drivers derive per-run streams from one master seed via
``SeedSequence(master).spawn(n)``, child i feeding run i in config order, so
whole reports are reproducible from (scenario, configs, seed).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dispatch import decode_schedule, evaluate, schedule_from_starts
from .errors import SearchSpaceError, ValidationError
from .loads import Load, feasible_start_bounds
from .scenario import Scenario

ALGORITHMS = ("ga", "bpso", "de")


@dataclass
class OptimizerConfig:
    """Hyperparameters for one optimizer run.

    Defaults are conventional choices, all exposed for configuration. ``mutation_prob=None`` resolves to 1/dims at run time.
    """

    algorithm: str = "ga"
    population_size: int = 50
    max_generations: int = 200
    seed: int | None = None
    stall_generations: int = 50
    stall_tolerance: float = 1e-9
    # GA
    crossover_prob: float = 0.9
    mutation_prob: float | None = None
    tournament_size: int = 3
    # BPSO
    alpha1: float = 2.0
    alpha2: float = 2.0
    v_max: float = 4.0
    inertia: float = 1.0
    # DE
    de_scale: float = 0.7
    de_crossover: float = 0.9

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm '{self.algorithm}'")
        if self.population_size < 4:
            raise ValidationError("population_size must be >= 4")
        if self.max_generations < 1:
            raise ValidationError("max_generations must be >= 1")
        if self.stall_generations < 1:
            raise ValidationError("stall_generations must be >= 1")
        for name in ("crossover_prob", "de_scale", "de_crossover"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {p}")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValidationError("mutation_prob must be in [0, 1]")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValidationError("tournament_size must be in [1, population_size]")
        if self.v_max <= 0:
            raise ValidationError("v_max must be > 0")
        if self.alpha1 < 0 or self.alpha2 < 0 or self.inertia < 0:
            raise ValidationError("alpha1, alpha2 and inertia must be >= 0")
        return self


@dataclass
class RunResult:
    """Outcome of one optimizer run.

    ``history`` is the best-so-far cost after each generation (monotone
    non-increasing); ``mean_history`` the population mean per generation.
    """

    algorithm: str
    best_genome: np.ndarray
    best_cost: float
    history: list[float] = field(default_factory=list)
    mean_history: list[float] = field(default_factory=list)
    evaluations: int = 0
    generations: int = 0
    wall_time_s: float = 0.0


class ScheduleObjective:
    """Memoizing schedule cost function for one scenario."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._cache: dict[bytes, float] = {}
        self.evaluations = 0

    def __call__(self, genome) -> float:
        self.evaluations += 1
        sched = decode_schedule(genome, self.scenario.loads, self.scenario.horizon)
        key = sched.starts.tobytes()
        cost = self._cache.get(key)
        if cost is None:
            cost = evaluate(self.scenario, sched).total
            self._cache[key] = cost
        return cost

    def cost_of_starts(self, starts) -> float:
        self.evaluations += 1
        starts = np.asarray(starts, dtype=np.int64)
        key = starts.tobytes()
        cost = self._cache.get(key)
        if cost is None:
            sched = schedule_from_starts(
                starts, self.scenario.loads, self.scenario.horizon
            )
            cost = evaluate(self.scenario, sched).total
            self._cache[key] = cost
        return cost


def _rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _empty_run(algorithm: str, objective) -> RunResult:
    cost = float(objective(np.zeros(0, dtype=np.float64)))
    return RunResult(
        algorithm=algorithm,
        best_genome=np.zeros(0, dtype=np.uint8),
        best_cost=cost,
        history=[cost],
        mean_history=[cost],
        evaluations=1,
        generations=0,
    )


def _seed_population(pop: np.ndarray, seed_genomes, binary: bool):
    if not seed_genomes:
        return
    for i, genome in enumerate(seed_genomes[: len(pop)]):
        g = np.asarray(genome, dtype=np.float64).ravel()
        if g.size != pop.shape[1]:
            raise ValidationError("seed genome length does not match dimensions")
        pop[i] = (g > 0.5).astype(pop.dtype) if binary else g


class _Tracker:
    """Best-so-far bookkeeping with stall-based early exit."""

    def __init__(self, cfg: OptimizerConfig):
        self.cfg = cfg
        self.best_cost = np.inf
        self.best_genome = None
        self.history: list[float] = []
        self.mean_history: list[float] = []
        self._stall = 0

    def record(self, pop, costs) -> bool:
        """Fold one generation in; returns True when the run should stop."""
        idx = int(np.argmin(costs))
        improved = costs[idx] < self.best_cost - self.cfg.stall_tolerance
        if costs[idx] < self.best_cost:
            self.best_cost = float(costs[idx])
            self.best_genome = pop[idx].copy()
        self.history.append(self.best_cost)
        self.mean_history.append(float(np.mean(costs)))
        self._stall = 0 if improved else self._stall + 1
        return self._stall >= self.cfg.stall_generations


def pso_velocity(v_prev, pull_local, pull_global, v_max, inertia=1.0):
    """One velocity update: inertia * v + local pull + global pull, clamped
    to [-v_max, v_max]. Pulls are the alpha*rand*(best - position) products.
    Broadcasts over arrays."""
    return np.clip(inertia * v_prev + pull_local + pull_global, -v_max, v_max)


def de_mutant(v1, v2, v3, scale):
    """Donor combination v1 + scale * (v2 - v3), clamped into [0, 1]."""
    return np.clip(v1 + scale * (v2 - v3), 0.0, 1.0)


def binomial_crossover(rng, target, mutant, cr):
    """Per-component choice of the mutant with probability cr."""
    mask = rng.random(target.shape) <= cr
    return np.where(mask, mutant, target)


def _pick_donors(rng, pop_size: int, target: int) -> list[int]:
    """Three pairwise-distinct indices, all different from the target."""
    donors: list[int] = []
    while len(donors) < 3:
        c = int(rng.integers(0, pop_size))
        if c != target and c not in donors:
            donors.append(c)
    return donors


def _tournament(rng, costs, k: int) -> int:
    idx = rng.integers(0, len(costs), size=k)
    return int(idx[int(np.argmin(costs[idx]))])


def ga_run(
    objective: Callable,
    dims: int,
    cfg: OptimizerConfig,
    seed=None,
    seed_genomes=None,
) -> RunResult:
    """Genetic algorithm: binary genomes, tournament selection, single-point
    crossover, per-bit flip mutation, single-elite preservation."""
    cfg.validate()
    t0 = time.perf_counter()
    if dims == 0:
        return _empty_run("ga", objective)
    rng = _rng_from(cfg.seed if seed is None else seed)
    p = cfg.population_size
    pm = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / dims

    pop = (rng.random((p, dims)) > 0.5).astype(np.uint8)
    _seed_population(pop, seed_genomes, binary=True)
    costs = np.array([objective(ind) for ind in pop])
    evals = p
    tracker = _Tracker(cfg)
    tracker.record(pop, costs)

    gens = 0
    for _ in range(cfg.max_generations):
        new = np.empty_like(pop)
        new[0] = tracker.best_genome
        fill = 1
        while fill < p:
            a = pop[_tournament(rng, costs, cfg.tournament_size)].copy()
            b = pop[_tournament(rng, costs, cfg.tournament_size)].copy()
            if dims > 1 and rng.random() < cfg.crossover_prob:
                cut = int(rng.integers(1, dims))
                a[cut:], b[cut:] = b[cut:].copy(), a[cut:].copy()
            for child in (a, b):
                flips = rng.random(dims) < pm
                child[flips] ^= 1
                if fill < p:
                    new[fill] = child
                    fill += 1
        pop = new
        costs = np.array([objective(ind) for ind in pop])
        evals += p
        gens += 1
        if tracker.record(pop, costs):
            break

    return RunResult(
        algorithm="ga",
        best_genome=tracker.best_genome.astype(np.uint8),
        best_cost=tracker.best_cost,
        history=tracker.history,
        mean_history=tracker.mean_history,
        evaluations=evals,
        generations=gens,
        wall_time_s=time.perf_counter() - t0,
    )


def bpso_run(
    objective: Callable,
    dims: int,
    cfg: OptimizerConfig,
    seed=None,
    seed_genomes=None,
) -> RunResult:
    """Binary PSO: real positions in [0, 1] thresholded at 0.5 on decoding,
    velocities clamped to +/- v_max. The update carries no inertia weight by
    default (inertia 1); a different weight can be configured."""
    cfg.validate()
    t0 = time.perf_counter()
    if dims == 0:
        return _empty_run("bpso", objective)
    rng = _rng_from(cfg.seed if seed is None else seed)
    p = cfg.population_size

    pos = rng.random((p, dims))
    vel = rng.uniform(-cfg.v_max, cfg.v_max, (p, dims))
    _seed_population(pos, seed_genomes, binary=False)
    costs = np.array([objective(x) for x in pos])
    evals = p
    pbest = pos.copy()
    pbest_cost = costs.copy()
    g_idx = int(np.argmin(costs))
    gbest = pos[g_idx].copy()

    tracker = _Tracker(cfg)
    tracker.record(pos, costs)

    gens = 0
    for _ in range(cfg.max_generations):
        r1 = rng.random((p, dims))
        r2 = rng.random((p, dims))
        vel = pso_velocity(
            vel,
            cfg.alpha1 * r1 * (pbest - pos),
            cfg.alpha2 * r2 * (gbest - pos),
            cfg.v_max,
            cfg.inertia,
        )
        pos = np.clip(pos + vel, 0.0, 1.0)
        costs = np.array([objective(x) for x in pos])
        evals += p
        better = costs < pbest_cost
        pbest[better] = pos[better]
        pbest_cost[better] = costs[better]
        g_idx = int(np.argmin(pbest_cost))
        gbest = pbest[g_idx].copy()
        gens += 1
        if tracker.record(pos, costs):
            break

    best_bits = (tracker.best_genome > 0.5).astype(np.uint8)
    return RunResult(
        algorithm="bpso",
        best_genome=best_bits,
        best_cost=tracker.best_cost,
        history=tracker.history,
        mean_history=tracker.mean_history,
        evaluations=evals,
        generations=gens,
        wall_time_s=time.perf_counter() - t0,
    )


def de_run(
    objective: Callable,
    dims: int,
    cfg: OptimizerConfig,
    seed=None,
    seed_genomes=None,
) -> RunResult:
    """Differential evolution (rand/1/bin): three distinct donors per target,
    binomial crossover, greedy replacement."""
    cfg.validate()
    t0 = time.perf_counter()
    if dims == 0:
        return _empty_run("de", objective)
    rng = _rng_from(cfg.seed if seed is None else seed)
    p = cfg.population_size

    pop = rng.random((p, dims))
    _seed_population(pop, seed_genomes, binary=False)
    costs = np.array([objective(x) for x in pop])
    evals = p
    tracker = _Tracker(cfg)
    tracker.record(pop, costs)

    gens = 0
    for _ in range(cfg.max_generations):
        for j in range(p):
            r1, r2, r3 = _pick_donors(rng, p, j)
            mutant = de_mutant(pop[r1], pop[r2], pop[r3], cfg.de_scale)
            trial = binomial_crossover(rng, pop[j], mutant, cfg.de_crossover)
            trial_cost = objective(trial)
            evals += 1
            if trial_cost <= costs[j]:
                pop[j] = trial
                costs[j] = trial_cost
        gens += 1
        if tracker.record(pop, costs):
            break

    best_bits = (tracker.best_genome > 0.5).astype(np.uint8)
    return RunResult(
        algorithm="de",
        best_genome=best_bits,
        best_cost=tracker.best_cost,
        history=tracker.history,
        mean_history=tracker.mean_history,
        evaluations=evals,
        generations=gens,
        wall_time_s=time.perf_counter() - t0,
    )


RUNNERS = {"ga": ga_run, "bpso": bpso_run, "de": de_run}


def schedule_space_size(loads: Sequence[Load], horizon: int) -> int:
    """Number of valid contiguous-run schedules."""
    count = 1
    for load in loads:
        lo, hi = feasible_start_bounds(load, horizon)
        count *= hi - lo + 1
    return count


def exhaustive_oracle(
    objective: ScheduleObjective,
    loads: Sequence[Load],
    horizon: int,
    limit: int = 1_000_000,
):
    """Enumerate every valid schedule; returns (best starts, best cost).

    Ties break toward the lexicographically smallest start tuple. Refuses
    with SearchSpaceError (carrying the computed count) beyond ``limit``.
    """
    count = schedule_space_size(loads, horizon)
    if count > limit:
        raise SearchSpaceError(count, limit)
    ranges = [
        range(lo, hi + 1)
        for lo, hi in (feasible_start_bounds(ld, horizon) for ld in loads)
    ]
    best_cost = np.inf
    best_starts = None
    for starts in itertools.product(*ranges):
        cost = objective.cost_of_starts(starts)
        if cost < best_cost:
            best_cost = cost
            best_starts = starts
    return best_starts, float(best_cost)
