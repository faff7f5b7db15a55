"""Pure-Python dispatch kernel.

Mirror of ``_dispatch_cy.pyx``: keep both in lockstep, same operations in the
same order, so the two backends agree bit for bit. The per-slot rule is:

  1. PV serves the scheduled load.
  2. Surplus PV charges the battery up to the feasible charge bound.
  3. In grid-charge slots the battery stays idle and the remaining headroom
     is bought from the grid; otherwise the residual load is met by battery
     discharge up to its bound, then by grid purchase.
  4. PV surplus beyond the battery is sold, capped per slot.
  5. The battery state advances by the decay/efficiency update.

Battery actions below the per-direction activity floors are skipped (the
sliver is sold or bought instead): the cycle-degradation model diverges as
activity approaches zero, so micro-cycling must never be dispatched.
"""

from math import exp


def run_dispatch(
    x_total,
    pv,
    price_buy,
    price_sell,
    grid_charge_ok,
    b_max,
    e_min,
    e_max,
    h_max,
    k_max,
    decay,
    eff_c,
    eff_d,
    rated_c,
    rated_d,
    w0,
    w1,
    w2,
    w3,
    cost_scale,
    min_charge,
    min_discharge,
    initial_stored,
    out_grid_to_battery,
    out_pv_to_load,
    out_pv_to_battery,
    out_discharge,
    out_bought,
    out_sold,
    out_state,
):
    """Run the per-slot dispatch loop; returns (buy, sell, degradation) cents."""
    xs = [float(v) for v in x_total]
    gens = [float(v) for v in pv]
    pb = [float(v) for v in price_buy]
    ps = [float(v) for v in price_sell]
    ok = [int(v) for v in grid_charge_ok]
    n = len(xs)

    buy_total = 0.0
    sell_total = 0.0
    deg_total = 0.0
    e = float(initial_stored)

    for t in range(n):
        load = xs[t]
        gen = gens[t]
        c_pv = gen if gen < load else load
        surplus = gen - c_pv
        headroom = e_max - e
        if h_max < headroom:
            headroom = h_max
        if headroom < 0.0:
            headroom = 0.0
        r_pv = surplus if surplus < headroom else headroom
        residual = load - c_pv
        k = 0.0
        e_g = 0.0
        grid_load = 0.0
        if ok[t]:
            e_g = headroom - r_pv
            grid_load = residual
        elif residual > 0.0:
            avail = e - e_min
            if k_max < avail:
                avail = k_max
            if decay < 1.0:
                lim = (decay * e - e_min) / eff_d
                if lim < avail:
                    avail = lim
            if avail < 0.0:
                avail = 0.0
            need = residual / eff_d
            k = need if need < avail else avail
            if k < min_discharge:
                k = 0.0
            grid_load = residual - eff_d * k
            if grid_load < 0.0:
                grid_load = 0.0
        charge = r_pv + e_g
        if 0.0 < charge < min_charge:
            e_g = 0.0
            r_pv = 0.0
            charge = 0.0
        exportable = surplus - r_pv
        sold = exportable if exportable < b_max else b_max
        if sold < 0.0:
            sold = 0.0
        bought = grid_load + e_g
        buy_total += pb[t] * bought
        sell_total += ps[t] * sold
        if charge > 0.0:
            deg_total += (
                cost_scale
                * (rated_c / charge) ** w0
                * exp(w1 * (charge / rated_c - 1.0))
            )
        if k > 0.0:
            deg_total += (
                cost_scale
                * (rated_d / k) ** w2
                * exp(w3 * (k / rated_d - 1.0))
            )
        e2 = decay * e + eff_c * charge - eff_d * k
        if e2 < e_min and e2 > e_min - 1e-9:
            e2 = e_min
        elif e2 > e_max and e2 < e_max + 1e-9:
            e2 = e_max
        out_grid_to_battery[t] = e_g
        out_pv_to_load[t] = c_pv
        out_pv_to_battery[t] = r_pv
        out_discharge[t] = k
        out_bought[t] = bought
        out_sold[t] = sold
        out_state[t] = e2
        e = e2

    return buy_total, sell_total, deg_total
