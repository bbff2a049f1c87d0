"""Domain types, parameter validation, and deterministic economy construction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParameterError",
    "MarketParams",
    "AgentState",
    "EconomyState",
    "RngStream",
    "validate_params",
    "init_economy",
]


class ParameterError(ValueError):
    """Raised when a simulation is constructed from invalid parameters."""


@dataclass(frozen=True)
class MarketParams:
    """The tunable constants of the economy.

    ``typical_goods_per_day`` is the reference daily consumption bundle used
    to express savings in days of purchasing power; when left unset it
    defaults to ``productivity``, so that at unit price one day's output
    costs one unit of money per good made.

    The defaults are calibrated for a stable interior market. Buyers take at
    most one unit per day, so demand is capped at n_agents units per day;
    productivity must stay below 1.0 or supply structurally exceeds demand,
    storage saturates, and prices collapse in a permanent fire sale. Keeping
    max_stock within a few weeks of production (here 20 days) lets the
    repricing policy's day-horizon thresholds react while imbalances are
    still small, which is what makes the price attractor tight.
    """

    n_agents: int = 30
    initial_savings: float = 100.0
    initial_price: float = 1.0
    productivity: float = 0.5
    consume_factor: float = 0.95
    max_stock: float = 10.0
    min_price_change_period: int = 5
    typical_goods_per_day: float | None = None
    goods_utility_scale: float = 5.0
    savings_utility_scale: float = 10.0
    sellers_sampled: int = 3

    def __post_init__(self):
        if self.typical_goods_per_day is None:
            object.__setattr__(self, "typical_goods_per_day", float(self.productivity))


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def validate_params(params: MarketParams) -> list[str]:
    """Return human-readable invariant violations; an empty list means valid.

    Violations are data, not failures: callers that must not proceed on bad
    input (``init_economy``, the CLI) raise :class:`ParameterError` themselves.
    """
    v = []
    if params.n_agents < 2:
        v.append(
            "n_agents must be at least 2: agents never consume their own "
            "produce, so trade requires a counterparty"
        )
    if not _finite(params.initial_savings) or params.initial_savings < 0:
        v.append("initial_savings must be finite and >= 0")
    if not _finite(params.initial_price) or params.initial_price <= 0:
        v.append("initial_price must be finite and > 0")
    if not _finite(params.productivity) or params.productivity <= 0:
        v.append("productivity must be finite and > 0")
    if not _finite(params.consume_factor) or not 0.0 < params.consume_factor < 1.0:
        v.append("consume_factor must lie strictly between 0 and 1")
    if not _finite(params.max_stock) or params.max_stock <= params.productivity:
        v.append("max_stock must exceed productivity (storage holds at least one day of output)")
    if params.min_price_change_period < 1:
        v.append("min_price_change_period must be at least 1")
    if not _finite(params.typical_goods_per_day) or params.typical_goods_per_day <= 0:
        v.append("typical_goods_per_day must be finite and > 0")
    if not _finite(params.goods_utility_scale) or params.goods_utility_scale <= 0:
        v.append("goods_utility_scale must be finite and > 0")
    if not _finite(params.savings_utility_scale) or params.savings_utility_scale <= 0:
        v.append("savings_utility_scale must be finite and > 0")
    if not 1 <= params.sellers_sampled <= params.n_agents - 1:
        v.append("sellers_sampled must lie between 1 and n_agents - 1")
    return v


@dataclass
class AgentState:
    """One agent: money, the two inventories, and repricing bookkeeping.

    ``stock_for_sale`` is produce the agent made itself and can only sell;
    ``consumable`` is produce bought from others. Keeping the two apart is
    what forces trade: nobody consumes their own output.
    """

    id: int
    savings: float
    stock_for_sale: float
    consumable: float
    price: float
    iterations_since_reprice: int = 0
    units_sold_since_reprice: float = 0.0


@dataclass
class EconomyState:
    """The full population plus iteration counter; the unit of stepping."""

    iteration: int
    agents: list[AgentState]
    params: MarketParams


_RAW_BLOCK = 4096


class RngStream:
    """Reproducible uint64 stream with an exact, serializable position.

    The stream is fully described by ``(seed, consumed)``: the k-th value
    produced is the k-th raw 64-bit output of ``PCG64(seed)``. Every engine
    backend consumes the same logical sequence, so trajectories are
    bit-identical across backends and across segment boundaries (the buffer
    here is prefetch only; it never shifts the logical position).
    """

    __slots__ = ("seed", "consumed", "_buf", "_pos")

    def __init__(self, seed: int, consumed: int = 0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if consumed < 0:
            raise ParameterError("consumed draw count cannot be negative")
        self.seed = seed
        self.consumed = int(consumed)
        self._buf = None
        self._pos = 0

    def bit_generator(self) -> np.random.PCG64:
        """A fresh PCG64 advanced to the current stream position."""
        bg = np.random.PCG64(self.seed)
        if self.consumed:
            bg.advance(self.consumed)
        return bg

    def skip(self, n_draws: int) -> None:
        """Account for draws consumed externally (e.g. by the compiled kernel)."""
        if n_draws < 0:
            raise ValueError("cannot skip a negative number of draws")
        self.consumed += int(n_draws)
        self._buf = None
        self._pos = 0

    def next_u64(self) -> int:
        buf = self._buf
        if buf is None or self._pos >= len(buf):
            buf = self.bit_generator().random_raw(_RAW_BLOCK)
            self._buf = buf
            self._pos = 0
        value = int(buf[self._pos])
        self._pos += 1
        self.consumed += 1
        return value

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by masked rejection; n <= 1 draws nothing."""
        if n <= 1:
            return 0
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            r = self.next_u64() & mask
            if r < n:
                return r

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        return order

    def sample(self, pool: list[int], k: int) -> list[int]:
        """Uniform subset of min(k, len(pool)) distinct elements, partial Fisher-Yates."""
        m = len(pool)
        if k > m:
            k = m
        picked = list(pool)
        for i in range(k):
            j = i + self.randbelow(m - i)
            picked[i], picked[j] = picked[j], picked[i]
        return picked[:k]


def init_economy(params: MarketParams, seed: int) -> tuple[EconomyState, RngStream]:
    """Build the iteration-zero economy and its seeded RNG stream.

    Every agent starts with the same money endowment, both inventories empty,
    the common starting price, and zeroed repricing counters.
    """
    violations = validate_params(params)
    if violations:
        raise ParameterError("; ".join(violations))
    agents = [
        AgentState(
            id=i,
            savings=float(params.initial_savings),
            stock_for_sale=0.0,
            consumable=0.0,
            price=float(params.initial_price),
        )
        for i in range(params.n_agents)
    ]
    return EconomyState(iteration=0, agents=agents, params=params), RngStream(seed)
