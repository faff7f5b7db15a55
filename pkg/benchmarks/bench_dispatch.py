"""Benchmark the compiled dispatch kernel against the pure-Python fallback.

Runs the same randomized inputs through both backends, checks they agree
exactly, and reports per-call timings plus an end-to-end schedule-evaluation
rate on the bundled example scenario.

Usage:
    python benchmarks/bench_dispatch.py [--slots 8760] [--repeats 200]
"""

import argparse
import time

import numpy as np

from pemc import _dispatch_py
from pemc.dispatch import decode_schedule, evaluate
from pemc.scenario import example_scenario_path, load_scenario

try:
    from pemc import _dispatch_cy
except ImportError:
    _dispatch_cy = None


def make_inputs(slots: int, rng: np.random.Generator):
    x = rng.uniform(0.0, 4.0, slots)
    pv = rng.uniform(0.0, 5.0, slots)
    price_buy = rng.uniform(0.1, 3.7, slots)
    price_sell = rng.uniform(0.06, 0.57, slots)
    ok = (rng.random(slots) < 0.25).astype(np.uint8)
    scalars = dict(
        b_max=5.0,
        e_min=0.0,
        e_max=20.0,
        h_max=5.0,
        k_max=5.0,
        decay=1.0,
        eff_c=0.95,
        eff_d=0.95,
        rated_c=2.5,
        rated_d=2.5,
        w0=1.3,
        w1=0.9,
        w2=1.3,
        w3=0.9,
        cost_scale=1.0,
        min_charge=0.5,
        min_discharge=0.5,
        initial_stored=5.0,
    )
    return x, pv, price_buy, price_sell, ok, scalars


def run_backend(run_dispatch, arrays, scalars, repeats: int):
    x, pv, pb, ps, ok = arrays
    outs = [np.empty(len(x)) for _ in range(7)]
    t0 = time.perf_counter()
    for _ in range(repeats):
        totals = run_dispatch(x, pv, pb, ps, ok, *scalars.values(), *outs)
    elapsed = (time.perf_counter() - t0) / repeats
    return totals, outs, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--slots", type=int, default=8760)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    x, pv, pb, ps, ok, scalars = make_inputs(args.slots, rng)
    arrays = (x, pv, pb, ps, ok)

    totals_py, outs_py, t_py = run_backend(
        _dispatch_py.run_dispatch, arrays, scalars, args.repeats
    )
    print(f"python kernel: {t_py * 1e3:9.3f} ms per {args.slots}-slot dispatch")

    if _dispatch_cy is None:
        print("compiled kernel not available (install with Cython to compare)")
        return

    totals_cy, outs_cy, t_cy = run_backend(
        _dispatch_cy.run_dispatch, arrays, scalars, args.repeats
    )
    print(f"cython kernel: {t_cy * 1e3:9.3f} ms per {args.slots}-slot dispatch")
    print(f"speedup:       {t_py / t_cy:9.1f}x")

    assert totals_py == totals_cy, "backend totals diverged"
    for a, b in zip(outs_py, outs_cy):
        assert np.array_equal(a, b), "backend traces diverged"
    print("backends agree bit for bit")

    sc = load_scenario(example_scenario_path())
    dims = len(sc.loads) * sc.horizon
    genomes = rng.random((500, dims))
    t0 = time.perf_counter()
    for g in genomes:
        evaluate(sc, decode_schedule(g, sc.loads, sc.horizon))
    rate = len(genomes) / (time.perf_counter() - t0)
    print(f"end-to-end evaluate on the example day: {rate:9.0f} schedules/s")


if __name__ == "__main__":
    main()
