"""Iteration engine: produce, consume, purchase, reprice — in that order.

Two interchangeable backends execute the loop: a pure-Python reference
implementation (this module) and a compiled kernel (``agora._kernel``). Both
consume the same logical random stream and perform floating-point operations
in the same order, so their trajectories are bit-identical; ``Simulation``
picks the compiled one when it is importable.
"""

from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    EconomyState,
    MarketParams,
    ParameterError,
    RngStream,
    init_economy,
)
from .metrics import SnapshotRow, record_snapshot

try:
    from . import _kernel
except ImportError:
    _kernel = None

__all__ = [
    "TradeRecord",
    "RunResult",
    "Simulation",
    "step_produce",
    "step_consume",
    "sample_sellers",
    "step_purchase",
    "update_price",
    "step_modify_prices",
    "step",
    "run",
    "available_backends",
    "resolve_backend",
]

# Price-policy constants. Thresholds are in days; one iteration is one day.
DEEP_CUT = 0.85  # storage about to overflow: dump stock fast
SMALL_CUT = 0.95  # storage filling within two weeks
SMALL_RAISE = 1.05  # storage slack for months, or stock scarce
STEEP_RAISE = 1.1  # about to sell out
CAPACITY_CRUNCH_DAYS = 3.0
CAPACITY_NEAR_DAYS = 15.0
CAPACITY_SLACK_DAYS = 90.0
SELLOUT_SOON_DAYS = 3.0

BACKENDS = ("compiled", "python")


class TradeRecord(NamedTuple):
    """One executed trade; units is always 1."""

    iteration: int
    buyer_id: int
    seller_id: int
    price_paid: float
    units: int


def step_produce(state: EconomyState) -> float:
    """Add each agent's daily output to its for-sale stock, clamped at capacity.

    Returns the total overproduction discarded because storage was full.
    """
    params = state.params
    productivity = params.productivity
    max_stock = params.max_stock
    discarded = 0.0
    for agent in state.agents:
        new_stock = agent.stock_for_sale + productivity
        if new_stock > max_stock:
            discarded += new_stock - max_stock
            new_stock = max_stock
        agent.stock_for_sale = new_stock
    return discarded


def step_consume(state: EconomyState) -> None:
    """Decay every agent's consumable inventory by the daily consume factor."""
    factor = state.params.consume_factor
    for agent in state.agents:
        agent.consumable = agent.consumable * factor


def sample_sellers(state: EconomyState, buyer_id: int, rng: RngStream) -> list[int]:
    """Pick up to sellers_sampled distinct agents with at least one unit for sale.

    Eligible sellers are every agent other than the buyer holding stock >= 1;
    when fewer than sellers_sampled are eligible, all of them are returned.
    """
    eligible = [
        agent.id
        for agent in state.agents
        if agent.id != buyer_id and agent.stock_for_sale >= 1.0
    ]
    if not eligible:
        return []
    return rng.sample(eligible, state.params.sellers_sampled)


def _wellbeing_inline(
    consumable: float, savings: float, cost_of_day: float, goods_scale: float, savings_scale: float
) -> float:
    # Same operation order as utility.wellbeing; duplicated here (and in the
    # compiled kernel) so the hot loop avoids parameter-object indirection
    # while staying bit-compatible with the public function.
    ug = 1.0 - math.exp(-(consumable / goods_scale))
    us = 1.0 - math.exp(-((savings / cost_of_day) / savings_scale))
    return ug * us


def step_purchase(state: EconomyState, rng: RngStream) -> list[TradeRecord]:
    """Run one purchase phase; returns the trades that executed.

    Buyers act in a fresh random order. Each samples a few sellers, takes the
    cheapest (ties to the lowest id), and buys one unit iff it can afford it
    and the trade strictly improves its wellbeing at the phase-fixed price
    level. Savings and stock move immediately, so later buyers see the
    proceeds of earlier trades.
    """
    agents = state.agents
    params = state.params
    n = len(agents)
    # The price level all buyers use this phase, frozen before any trade.
    level = sum(agent.price for agent in agents) / n
    cost_of_day = level * params.typical_goods_per_day
    goods_scale = params.goods_utility_scale
    savings_scale = params.savings_utility_scale
    iteration = state.iteration + 1  # the 1-based index of the step in progress
    trades: list[TradeRecord] = []

    for buyer_idx in rng.permutation(n):
        buyer = agents[buyer_idx]
        sampled = sample_sellers(state, buyer_idx, rng)
        if not sampled:
            continue
        best_id = sampled[0]
        best_price = agents[best_id].price
        for seller_id in sampled[1:]:
            price = agents[seller_id].price
            if price < best_price or (price == best_price and seller_id < best_id):
                best_id = seller_id
                best_price = price
        if buyer.savings < best_price:
            continue
        now = _wellbeing_inline(
            buyer.consumable, buyer.savings, cost_of_day, goods_scale, savings_scale
        )
        after = _wellbeing_inline(
            buyer.consumable + 1.0,
            buyer.savings - best_price,
            cost_of_day,
            goods_scale,
            savings_scale,
        )
        if after > now:
            seller = agents[best_id]
            buyer.savings -= best_price
            buyer.consumable += 1.0
            seller.savings += best_price
            seller.stock_for_sale -= 1.0
            seller.units_sold_since_reprice += 1.0
            trades.append(TradeRecord(iteration, buyer_idx, best_id, best_price, 1))
    return trades


def update_price(agent, params: MarketParams) -> tuple[float, bool]:
    """Evaluate the repricing policy for one agent: (new_price, changed).

    Within the menu-cost period the price never moves. Otherwise the agent
    projects its stock trend since the last change: stock heading for full
    storage forces cuts (steeper the sooner it fills), a stock that will sit
    slack for months or is draining allows raises. The caller applies the
    returned price and resets the counters only when ``changed`` is true.
    """
    if agent.iterations_since_reprice <= params.min_price_change_period:
        return agent.price, False
    sales_per_day = agent.units_sold_since_reprice / agent.iterations_since_reprice
    growth = params.productivity - sales_per_day
    price = agent.price
    if growth > 0.0:
        days_till_full = (params.max_stock - agent.stock_for_sale) / growth
        if days_till_full < CAPACITY_CRUNCH_DAYS:
            return price * DEEP_CUT, True
        if days_till_full < CAPACITY_NEAR_DAYS:
            return price * SMALL_CUT, True
        if days_till_full > CAPACITY_SLACK_DAYS:
            return price * SMALL_RAISE, True
        return price, False
    if growth < 0.0:
        days_till_empty = agent.stock_for_sale / -growth
    else:
        days_till_empty = math.inf
    if days_till_empty < SELLOUT_SOON_DAYS:
        return price * STEEP_RAISE, True
    if agent.stock_for_sale < params.max_stock / 2.0:
        return price * SMALL_RAISE, True
    return price, False


def step_modify_prices(state: EconomyState) -> None:
    """Advance every agent's reprice clock and apply the pricing policy.

    Counters reset only when the price actually changes; evaluations that
    leave the price alone let the clock and the sales tally keep running.
    """
    params = state.params
    for agent in state.agents:
        agent.iterations_since_reprice += 1
        new_price, changed = update_price(agent, params)
        if changed:
            agent.price = new_price
            agent.iterations_since_reprice = 0
            agent.units_sold_since_reprice = 0.0


def step(state: EconomyState, rng: RngStream) -> tuple[list[TradeRecord], float]:
    """One full iteration: produce, consume, purchase, modify prices."""
    discarded = step_produce(state)
    step_consume(state)
    trades = step_purchase(state, rng)
    step_modify_prices(state)
    state.iteration += 1
    return trades, discarded


def available_backends() -> tuple[str, ...]:
    return BACKENDS if _kernel is not None else ("python",)


def resolve_backend(preference: str | None = None) -> str:
    """Resolve the engine backend: explicit argument, then the AGORA_BACKEND
    environment variable, then the compiled kernel when importable."""
    choice = preference or os.environ.get("AGORA_BACKEND")
    if choice is None:
        return "compiled" if _kernel is not None else "python"
    if choice not in BACKENDS:
        raise ParameterError(f"unknown backend {choice!r}; expected one of {BACKENDS}")
    if choice == "compiled" and _kernel is None:
        raise ParameterError("compiled backend requested but the kernel is not built")
    return choice


class Simulation:
    """A stateful run: owns the economy, the RNG stream, and the history.

    ``run`` may be called repeatedly; history accumulates. Because both
    backends consume the identical random stream, a simulation can even
    switch backends between ``run`` calls without changing the trajectory.
    """

    def __init__(
        self,
        params: MarketParams | None = None,
        seed: int = 0,
        backend: str | None = None,
    ):
        if params is None:
            params = MarketParams()
        self.params = params
        self.seed = seed
        self.backend = resolve_backend(backend)
        self.state, self.rng = init_economy(params, seed)
        self.snapshots: list[SnapshotRow] = []
        self.trades: list[TradeRecord] = []

    def run(self, n_iterations: int) -> "Simulation":
        if n_iterations < 1:
            raise ParameterError("n_iterations must be at least 1")
        if self.backend == "compiled":
            self._run_compiled(n_iterations)
        else:
            self._run_python(n_iterations)
        return self

    def _run_python(self, n_iterations: int) -> None:
        state, rng = self.state, self.rng
        for _ in range(n_iterations):
            trades, discarded = step(state, rng)
            self.snapshots.append(record_snapshot(state, len(trades), discarded))
            self.trades.extend(trades)

    def _run_compiled(self, n_iterations: int) -> None:
        state = self.state
        params = state.params
        agents = state.agents
        savings = np.array([a.savings for a in agents], dtype=np.float64)
        stock = np.array([a.stock_for_sale for a in agents], dtype=np.float64)
        consumable = np.array([a.consumable for a in agents], dtype=np.float64)
        price = np.array([a.price for a in agents], dtype=np.float64)
        iters_since = np.array(
            [a.iterations_since_reprice for a in agents], dtype=np.int64
        )
        units_sold = np.array(
            [a.units_sold_since_reprice for a in agents], dtype=np.float64
        )
        out = _kernel.run_iterations(
            savings,
            stock,
            consumable,
            price,
            iters_since,
            units_sold,
            self.rng.bit_generator(),
            n_iterations,
            state.iteration,
            params.productivity,
            params.consume_factor,
            params.max_stock,
            params.min_price_change_period,
            params.typical_goods_per_day,
            params.goods_utility_scale,
            params.savings_utility_scale,
            params.sellers_sampled,
        )
        self.rng.skip(out["draws"])
        for i, agent in enumerate(agents):
            agent.savings = float(savings[i])
            agent.stock_for_sale = float(stock[i])
            agent.consumable = float(consumable[i])
            agent.price = float(price[i])
            agent.iterations_since_reprice = int(iters_since[i])
            agent.units_sold_since_reprice = float(units_sold[i])
        first = state.iteration + 1
        state.iteration += n_iterations
        snap = out["snapshots"]
        for t in range(n_iterations):
            self.snapshots.append(
                SnapshotRow(
                    iteration=first + t,
                    avg_price=float(snap["avg_price"][t]),
                    min_price=float(snap["min_price"][t]),
                    max_price=float(snap["max_price"][t]),
                    total_money=float(snap["total_money"][t]),
                    total_stock_for_sale=float(snap["total_stock"][t]),
                    total_consumable=float(snap["total_consumable"][t]),
                    trades=int(snap["trades"][t]),
                    discarded_production=float(snap["discarded"][t]),
                )
            )
        tr = out["trades"]
        for k in range(out["n_trades"]):
            self.trades.append(
                TradeRecord(
                    iteration=int(tr["iteration"][k]),
                    buyer_id=int(tr["buyer_id"][k]),
                    seller_id=int(tr["seller_id"][k]),
                    price_paid=float(tr["price_paid"][k]),
                    units=1,
                )
            )

    def scale_all_prices(self, factor: float) -> None:
        """Multiply every advertised price by ``factor`` (a one-shot shock).

        Reprice clocks and sales tallies are left untouched, so agents react
        to the shock on their normal schedule.
        """
        if not (factor > 0.0 and math.isfinite(factor)):
            raise ParameterError("price scale factor must be finite and > 0")
        for agent in self.state.agents:
            agent.price *= factor

    def clone(self) -> "Simulation":
        """Deep, independent copy; the copy continues the same random stream."""
        return copy.deepcopy(self)

    def avg_price_series(self) -> np.ndarray:
        return np.array([row.avg_price for row in self.snapshots], dtype=np.float64)


@dataclass
class RunResult:
    final_state: EconomyState
    snapshots: list[SnapshotRow]
    trades: list[TradeRecord]

    def avg_price_series(self) -> np.ndarray:
        return np.array([row.avg_price for row in self.snapshots], dtype=np.float64)


def run(
    params: MarketParams,
    seed: int,
    n_iterations: int,
    backend: str | None = None,
) -> RunResult:
    """Execute a complete deterministic run and return its full history."""
    sim = Simulation(params, seed, backend)
    sim.run(n_iterations)
    return RunResult(sim.state, sim.snapshots, sim.trades)
