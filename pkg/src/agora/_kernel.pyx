# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python engine loop.

This kernel consumes the same logical 64-bit random stream and performs the
floating-point operations in the same order as the Python backend, so the two
produce bit-identical trajectories. Keep every arithmetic expression in lock
step with engine.py when editing either side. The module must be compiled
without -ffast-math for that guarantee to hold.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, exp
from numpy.random cimport bitgen_t

cnp.import_array()

# Price-policy constants; mirror engine.py.
cdef double DEEP_CUT = 0.85
cdef double SMALL_CUT = 0.95
cdef double SMALL_RAISE = 1.05
cdef double STEEP_RAISE = 1.1
cdef double CAPACITY_CRUNCH_DAYS = 3.0
cdef double CAPACITY_NEAR_DAYS = 15.0
cdef double CAPACITY_SLACK_DAYS = 90.0
cdef double SELLOUT_SOON_DAYS = 3.0


cdef inline unsigned long long _next64(bitgen_t *rng, unsigned long long *draws) noexcept nogil:
    draws[0] += 1
    return rng.next_uint64(rng.state)


cdef inline long long _randbelow(bitgen_t *rng, unsigned long long *draws, long long n) noexcept nogil:
    # Masked rejection over the low bits; identical draw usage to RngStream.
    cdef unsigned long long mask = 0, r
    cdef long long m = n - 1
    if n <= 1:
        return 0
    while m > 0:
        mask = (mask << 1) | 1
        m >>= 1
    while True:
        r = _next64(rng, draws) & mask
        if r < <unsigned long long> n:
            return <long long> r


cdef inline double _wellbeing(double consumable, double savings, double cost_of_day,
                              double goods_scale, double savings_scale) noexcept nogil:
    cdef double ug = 1.0 - exp(-(consumable / goods_scale))
    cdef double us = 1.0 - exp(-((savings / cost_of_day) / savings_scale))
    return ug * us


def run_iterations(
    double[::1] savings,
    double[::1] stock,
    double[::1] consumable,
    double[::1] price,
    cnp.int64_t[::1] iters_since,
    double[::1] units_sold,
    object bit_generator,
    long long n_iterations,
    long long start_iteration,
    double productivity,
    double consume_factor,
    double max_stock,
    long long min_period,
    double typical_goods,
    double goods_scale,
    double savings_scale,
    long long sellers_sampled,
):
    """Advance the economy arrays in place by n_iterations full steps.

    Returns per-iteration aggregates, the trade log, and the number of raw
    64-bit draws consumed (so the caller can advance its RngStream).
    """
    cdef long long n = savings.shape[0]
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator"
    )
    cdef unsigned long long draws = 0

    snap_avg = np.empty(n_iterations, dtype=np.float64)
    snap_min = np.empty(n_iterations, dtype=np.float64)
    snap_max = np.empty(n_iterations, dtype=np.float64)
    snap_money = np.empty(n_iterations, dtype=np.float64)
    snap_stock = np.empty(n_iterations, dtype=np.float64)
    snap_cons = np.empty(n_iterations, dtype=np.float64)
    snap_disc = np.empty(n_iterations, dtype=np.float64)
    snap_trades = np.empty(n_iterations, dtype=np.int64)
    cdef double[::1] v_avg = snap_avg
    cdef double[::1] v_min = snap_min
    cdef double[::1] v_max = snap_max
    cdef double[::1] v_money = snap_money
    cdef double[::1] v_stock = snap_stock
    cdef double[::1] v_cons = snap_cons
    cdef double[::1] v_disc = snap_disc
    cdef cnp.int64_t[::1] v_trades = snap_trades

    # At most one purchase per buyer per iteration bounds the trade log.
    trade_iter = np.empty(n_iterations * n, dtype=np.int64)
    trade_buyer = np.empty(n_iterations * n, dtype=np.int64)
    trade_seller = np.empty(n_iterations * n, dtype=np.int64)
    trade_price = np.empty(n_iterations * n, dtype=np.float64)
    cdef cnp.int64_t[::1] v_titer = trade_iter
    cdef cnp.int64_t[::1] v_tbuyer = trade_buyer
    cdef cnp.int64_t[::1] v_tseller = trade_seller
    cdef double[::1] v_tprice = trade_price

    order_arr = np.empty(n, dtype=np.int64)
    pool_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] order = order_arr
    cdef cnp.int64_t[::1] pool = pool_arr

    cdef long long t, i, j, oi, b, m, k, i2, j2, best, sid, total_trades = 0
    cdef long long trades_this_iter
    cdef cnp.int64_t tmp
    cdef double new_stock, discarded, level_sum, level, cost_of_day
    cdef double best_price, sp, wnow, wafter
    cdef double sales_per_day, growth, days_till_full, days_till_empty
    cdef double acc
    cdef bint changed

    with nogil:
        for t in range(n_iterations):
            # --- produce ---
            discarded = 0.0
            for i in range(n):
                new_stock = stock[i] + productivity
                if new_stock > max_stock:
                    discarded += new_stock - max_stock
                    new_stock = max_stock
                stock[i] = new_stock

            # --- consume ---
            for i in range(n):
                consumable[i] = consumable[i] * consume_factor

            # --- purchase ---
            level_sum = 0.0
            for i in range(n):
                level_sum += price[i]
            level = level_sum / n
            cost_of_day = level * typical_goods
            trades_this_iter = 0

            for i in range(n):
                order[i] = i
            i = n - 1
            while i > 0:
                j = _randbelow(rng, &draws, i + 1)
                tmp = order[i]
                order[i] = order[j]
                order[j] = tmp
                i -= 1

            for oi in range(n):
                b = order[oi]
                m = 0
                for j in range(n):
                    if j != b and stock[j] >= 1.0:
                        pool[m] = j
                        m += 1
                if m == 0:
                    continue
                k = sellers_sampled if sellers_sampled < m else m
                for i2 in range(k):
                    j2 = i2 + _randbelow(rng, &draws, m - i2)
                    tmp = pool[i2]
                    pool[i2] = pool[j2]
                    pool[j2] = tmp
                best = pool[0]
                best_price = price[best]
                for i2 in range(1, k):
                    sid = pool[i2]
                    sp = price[sid]
                    if sp < best_price or (sp == best_price and sid < best):
                        best = sid
                        best_price = sp
                if savings[b] < best_price:
                    continue
                wnow = _wellbeing(consumable[b], savings[b], cost_of_day,
                                  goods_scale, savings_scale)
                wafter = _wellbeing(consumable[b] + 1.0, savings[b] - best_price,
                                    cost_of_day, goods_scale, savings_scale)
                if wafter > wnow:
                    savings[b] -= best_price
                    consumable[b] += 1.0
                    savings[best] += best_price
                    stock[best] -= 1.0
                    units_sold[best] += 1.0
                    v_titer[total_trades] = start_iteration + t + 1
                    v_tbuyer[total_trades] = b
                    v_tseller[total_trades] = best
                    v_tprice[total_trades] = best_price
                    total_trades += 1
                    trades_this_iter += 1

            # --- modify prices ---
            for i in range(n):
                iters_since[i] += 1
                if iters_since[i] <= min_period:
                    continue
                sales_per_day = units_sold[i] / <double> iters_since[i]
                growth = productivity - sales_per_day
                changed = 0
                if growth > 0.0:
                    days_till_full = (max_stock - stock[i]) / growth
                    if days_till_full < CAPACITY_CRUNCH_DAYS:
                        price[i] = price[i] * DEEP_CUT
                        changed = 1
                    elif days_till_full < CAPACITY_NEAR_DAYS:
                        price[i] = price[i] * SMALL_CUT
                        changed = 1
                    elif days_till_full > CAPACITY_SLACK_DAYS:
                        price[i] = price[i] * SMALL_RAISE
                        changed = 1
                else:
                    if growth < 0.0:
                        days_till_empty = stock[i] / -growth
                    else:
                        days_till_empty = INFINITY
                    if days_till_empty < SELLOUT_SOON_DAYS:
                        price[i] = price[i] * STEEP_RAISE
                        changed = 1
                    elif stock[i] < max_stock / 2.0:
                        price[i] = price[i] * SMALL_RAISE
                        changed = 1
                if changed:
                    iters_since[i] = 0
                    units_sold[i] = 0.0

            # --- snapshot ---
            acc = 0.0
            for i in range(n):
                acc += price[i]
            v_avg[t] = acc / n
            best_price = price[0]
            sp = price[0]
            for i in range(1, n):
                if price[i] < best_price:
                    best_price = price[i]
                if price[i] > sp:
                    sp = price[i]
            v_min[t] = best_price
            v_max[t] = sp
            acc = 0.0
            for i in range(n):
                acc += savings[i]
            v_money[t] = acc
            acc = 0.0
            for i in range(n):
                acc += stock[i]
            v_stock[t] = acc
            acc = 0.0
            for i in range(n):
                acc += consumable[i]
            v_cons[t] = acc
            v_disc[t] = discarded
            v_trades[t] = trades_this_iter

    return {
        "snapshots": {
            "avg_price": snap_avg,
            "min_price": snap_min,
            "max_price": snap_max,
            "total_money": snap_money,
            "total_stock": snap_stock,
            "total_consumable": snap_cons,
            "discarded": snap_disc,
            "trades": snap_trades,
        },
        "trades": {
            "iteration": trade_iter[:total_trades],
            "buyer_id": trade_buyer[:total_trades],
            "seller_id": trade_seller[:total_trades],
            "price_paid": trade_price[:total_trades],
        },
        "n_trades": total_trades,
        "draws": draws,
    }
