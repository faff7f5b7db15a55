# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dispatch kernel.

Mirror of ``_dispatch_py.run_dispatch``: keep both in lockstep, same
operations in the same order, so the two backends agree bit for bit. See the
Python module for the rule description.
"""

from libc.math cimport exp, pow


def run_dispatch(
    double[::1] x_total,
    double[::1] pv,
    double[::1] price_buy,
    double[::1] price_sell,
    unsigned char[::1] grid_charge_ok,
    double b_max,
    double e_min,
    double e_max,
    double h_max,
    double k_max,
    double decay,
    double eff_c,
    double eff_d,
    double rated_c,
    double rated_d,
    double w0,
    double w1,
    double w2,
    double w3,
    double cost_scale,
    double min_charge,
    double min_discharge,
    double initial_stored,
    double[::1] out_grid_to_battery,
    double[::1] out_pv_to_load,
    double[::1] out_pv_to_battery,
    double[::1] out_discharge,
    double[::1] out_bought,
    double[::1] out_sold,
    double[::1] out_state,
):
    """Run the per-slot dispatch loop; returns (buy, sell, degradation) cents."""
    cdef Py_ssize_t t, n = x_total.shape[0]
    cdef double buy_total = 0.0
    cdef double sell_total = 0.0
    cdef double deg_total = 0.0
    cdef double e = initial_stored
    cdef double load, gen, c_pv, surplus, headroom, r_pv, residual
    cdef double k, e_g, grid_load, avail, lim, need, charge, exportable
    cdef double sold, bought, e2

    for t in range(n):
        load = x_total[t]
        gen = pv[t]
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
        if grid_charge_ok[t]:
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
        buy_total += price_buy[t] * bought
        sell_total += price_sell[t] * sold
        if charge > 0.0:
            deg_total += (
                cost_scale
                * pow(rated_c / charge, w0)
                * exp(w1 * (charge / rated_c - 1.0))
            )
        if k > 0.0:
            deg_total += (
                cost_scale
                * pow(rated_d / k, w2)
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
