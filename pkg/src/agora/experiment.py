"""Start-price sweeps: does the price settle on the same attractor from any start?"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import MarketParams, ParameterError
from .engine import run
from .metrics import ConvergenceReport, SnapshotRow, detect_convergence

__all__ = [
    "SweepSpec",
    "RunOutcome",
    "SweepReport",
    "run_sweep",
    "compare_attractors",
    "write_summary_csv",
    "SUMMARY_COLUMNS",
]

SUMMARY_COLUMNS = (
    "start_price",
    "seed",
    "converged",
    "settled_value",
    "settle_iteration",
    "trailing_cv",
)


@dataclass(frozen=True)
class SweepSpec:
    """One run per (start_price, seed) pair, all sharing the base parameters."""

    base_params: MarketParams
    start_prices: tuple[float, ...]
    seeds: tuple[int, ...]
    n_iterations: int = 5000
    convergence_window: int = 500
    cv_tolerance: float = 0.02

    def __post_init__(self):
        object.__setattr__(self, "start_prices", tuple(self.start_prices))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.start_prices:
            raise ParameterError("sweep needs at least one start price")
        if not self.seeds:
            raise ParameterError("sweep needs at least one seed")
        if not all(np.isfinite(p) and p > 0 for p in self.start_prices):
            raise ParameterError("start prices must be finite and > 0")
        if self.n_iterations < 1:
            raise ParameterError("n_iterations must be at least 1")
        if self.convergence_window < 2:
            raise ParameterError("convergence window must span at least 2 points")
        if self.n_iterations < self.convergence_window:
            raise ParameterError(
                "n_iterations must be at least the convergence window "
                f"({self.n_iterations} < {self.convergence_window})"
            )
        if not self.cv_tolerance > 0:
            raise ParameterError("cv tolerance must be > 0")


@dataclass(frozen=True)
class RunOutcome:
    """Result of one sweep run; ``error`` is set instead of a report on failure."""

    start_price: float
    seed: int
    report: ConvergenceReport | None
    snapshots: list[SnapshotRow] | None
    error: str | None = None

    def avg_price_series(self) -> np.ndarray:
        if self.snapshots is None:
            raise ValueError("run failed; no trajectory recorded")
        return np.array([row.avg_price for row in self.snapshots], dtype=np.float64)


@dataclass(frozen=True)
class SweepReport:
    runs: list[RunOutcome]
    all_converged: bool
    # (max - min) / mean of settled values over converged runs; None when
    # fewer than two runs converged.
    attractor_spread: float | None


def _sweep_one(job) -> RunOutcome:
    params, start_price, seed, n_iterations, window, tolerance = job
    try:
        result = run(replace(params, initial_price=start_price), seed, n_iterations)
    except ParameterError as exc:
        return RunOutcome(start_price, seed, None, None, str(exc))
    report = detect_convergence(result.avg_price_series(), window, tolerance)
    return RunOutcome(start_price, seed, report, result.snapshots)


def run_sweep(spec: SweepSpec, max_workers: int = 1) -> SweepReport:
    """Execute every (start_price, seed) run and aggregate the reports.

    Runs are independent, each with its own RNG stream seeded directly from
    the spec, so results are identical at any parallelism level; the report
    always lists runs in spec order (start prices outer, seeds inner).
    """
    jobs = [
        (spec.base_params, sp, seed, spec.n_iterations, spec.convergence_window, spec.cv_tolerance)
        for sp in spec.start_prices
        for seed in spec.seeds
    ]
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(_sweep_one, jobs))
    else:
        outcomes = [_sweep_one(job) for job in jobs]

    settled = [
        o.report.settled_value for o in outcomes if o.report is not None and o.report.converged
    ]
    spread = None
    if len(settled) >= 2:
        spread = (max(settled) - min(settled)) / (sum(settled) / len(settled))
    all_converged = all(o.report is not None and o.report.converged for o in outcomes)
    return SweepReport(runs=outcomes, all_converged=all_converged, attractor_spread=spread)


def compare_attractors(report: SweepReport, rel_tolerance: float) -> tuple[bool, float]:
    """Pass iff the settled values of converged runs agree within rel_tolerance."""
    if report.attractor_spread is None:
        raise ValueError("attractor comparison needs at least two converged runs")
    return report.attractor_spread < rel_tolerance, report.attractor_spread


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, float) else str(value)


def write_summary_csv(path, report: SweepReport) -> None:
    """One row per run, in report order; failed runs carry nan statistics."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for o in report.runs:
            if o.report is None:
                row = [o.start_price, o.seed, False, float("nan"), None, float("nan")]
            else:
                row = [
                    o.start_price,
                    o.seed,
                    o.report.converged,
                    o.report.settled_value,
                    o.report.settle_iteration,
                    o.report.trailing_cv,
                ]
            writer.writerow([_fmt(v) for v in row])
