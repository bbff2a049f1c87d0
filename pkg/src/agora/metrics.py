"""Per-iteration snapshots, convergence detection, and CSV round-tripping."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import EconomyState

__all__ = [
    "SnapshotRow",
    "TRAJECTORY_COLUMNS",
    "average_selling_price",
    "total_money",
    "record_snapshot",
    "ConvergenceReport",
    "detect_convergence",
    "trajectory_csv_text",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

TRAJECTORY_COLUMNS = (
    "iteration",
    "avg_price",
    "min_price",
    "max_price",
    "total_money",
    "total_stock_for_sale",
    "total_consumable",
    "trades",
    "discarded_production",
)


class SnapshotRow(NamedTuple):
    iteration: int
    avg_price: float
    min_price: float
    max_price: float
    total_money: float
    total_stock_for_sale: float
    total_consumable: float
    trades: int
    discarded_production: float


def average_selling_price(state: EconomyState) -> float:
    """Unweighted mean of advertised prices; the model's price level."""
    agents = state.agents
    return sum(a.price for a in agents) / len(agents)


def total_money(state: EconomyState) -> float:
    return sum(a.savings for a in state.agents)


def record_snapshot(state: EconomyState, trades: int, discarded: float) -> SnapshotRow:
    """Summarize the economy after one full iteration's phases have run."""
    agents = state.agents
    prices = [a.price for a in agents]
    return SnapshotRow(
        iteration=state.iteration,
        avg_price=sum(prices) / len(prices),
        min_price=min(prices),
        max_price=max(prices),
        total_money=total_money(state),
        total_stock_for_sale=sum(a.stock_for_sale for a in agents),
        total_consumable=sum(a.consumable for a in agents),
        trades=trades,
        discarded_production=discarded,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    settled_value: float
    settle_iteration: int | None
    trailing_cv: float


def detect_convergence(
    series, window: int = 500, cv_tolerance: float = 0.02
) -> ConvergenceReport:
    """Judge whether a series has settled, by trailing coefficient of variation.

    The series converged when std/mean over the final ``window`` points is
    below ``cv_tolerance``.  ``settled_value`` is the mean of that final
    window. ``settle_iteration`` is the first index from which every sliding
    window of the given length also passes -- the earliest point the series
    was already settled -- or None when the series never converged.

    A mean of zero (or a negative mean; the series is expected positive)
    never passes, since relative spread is meaningless there. A series
    shorter than the window is a usage error.
    """
    values = np.asarray(series, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if window < 2:
        raise ValueError("window must span at least 2 points")
    if len(values) < window:
        raise ValueError(
            f"series of length {len(values)} is shorter than the window ({window})"
        )

    windows = sliding_window_view(values, window)
    means = windows.mean(axis=1)
    stds = windows.std(axis=1)  # population std: ddof=0
    with np.errstate(divide="ignore", invalid="ignore"):
        cvs = np.where(means > 0.0, stds / means, np.inf)

    trailing_cv = float(cvs[-1])
    settled_value = float(means[-1])
    if not trailing_cv < cv_tolerance:
        return ConvergenceReport(False, settled_value, None, trailing_cv)

    passing = cvs < cv_tolerance
    # Walk back from the end while every window keeps passing.
    idx = len(passing) - 1
    while idx > 0 and passing[idx - 1]:
        idx -= 1
    return ConvergenceReport(True, settled_value, int(idx), trailing_cv)


def _fmt(value) -> str:
    # repr round-trips floats exactly, which the byte-identity checks rely on.
    return repr(float(value)) if isinstance(value, float) else str(value)


def trajectory_csv_text(rows: list[SnapshotRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(TRAJECTORY_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return out.getvalue()


def write_trajectory_csv(path, rows: list[SnapshotRow]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(trajectory_csv_text(rows))


def read_trajectory_csv(path) -> list[SnapshotRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header: {header!r}")
        rows = []
        for rec in reader:
            rows.append(
                SnapshotRow(
                    iteration=int(rec[0]),
                    avg_price=float(rec[1]),
                    min_price=float(rec[2]),
                    max_price=float(rec[3]),
                    total_money=float(rec[4]),
                    total_stock_for_sale=float(rec[5]),
                    total_consumable=float(rec[6]),
                    trades=int(rec[7]),
                    discarded_production=float(rec[8]),
                )
            )
    return rows
