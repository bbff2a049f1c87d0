"""agora: a deterministic agent-based simulator of price discovery.

Thirty agents produce a single good, trade it for fiat money, and adjust
their posted prices from their own inventory trends. The average selling
price converges to an attractor that does not depend on the starting price;
this package exists to simulate that mechanism and test that claim.
"""

from .core import (
    AgentState,
    EconomyState,
    MarketParams,
    ParameterError,
    RngStream,
    init_economy,
    validate_params,
)
from .engine import RunResult, Simulation, TradeRecord, run
from .experiment import SweepReport, SweepSpec, compare_attractors, run_sweep
from .metrics import (
    ConvergenceReport,
    SnapshotRow,
    average_selling_price,
    detect_convergence,
    total_money,
)
from .utility import (
    diminishing_returns_utility,
    utility_from_goods,
    utility_from_savings,
    wellbeing,
)

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "ConvergenceReport",
    "EconomyState",
    "MarketParams",
    "ParameterError",
    "RngStream",
    "RunResult",
    "Simulation",
    "SnapshotRow",
    "SweepReport",
    "SweepSpec",
    "TradeRecord",
    "average_selling_price",
    "compare_attractors",
    "detect_convergence",
    "diminishing_returns_utility",
    "init_economy",
    "run",
    "run_sweep",
    "total_money",
    "utility_from_goods",
    "utility_from_savings",
    "validate_params",
    "wellbeing",
]
