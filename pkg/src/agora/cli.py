"""Command-line front end: run, sweep, and verify subcommands.

Exit codes are stable so CI can gate on them:
0 success, 1 invalid configuration, 2 I/O failure (including refusing to
overwrite existing outputs without --force), 3 attractor comparison failed,
4 invariant violation detected by verify.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .chart import line_chart_svg
from .config import load_config
from .core import MarketParams, ParameterError, init_economy
from .engine import (
    DEEP_CUT,
    SMALL_CUT,
    SMALL_RAISE,
    STEEP_RAISE,
    TradeRecord,
    run,
    step,
)
from .experiment import SweepSpec, compare_attractors, run_sweep, write_summary_csv
from .metrics import (
    SnapshotRow,
    detect_convergence,
    record_snapshot,
    total_money,
    trajectory_csv_text,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_ATTRACTOR = 3
EXIT_INVARIANT = 4

TRADE_COLUMNS = ("iteration", "buyer_id", "seller_id", "price_paid", "units")


class OutputExists(OSError):
    """Refusing to overwrite an existing output file without --force."""


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def trades_csv_text(trades: list[TradeRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(TRADE_COLUMNS)
    for t in trades:
        writer.writerow([_fmt(v) for v in t])
    return out.getvalue()


def write_trades_csv(path, trades: list[TradeRecord]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(trades_csv_text(trades))


def _prepare_out(out_dir: Path, filenames: list[str], force: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if force:
        return
    existing = [name for name in filenames if (out_dir / name).exists()]
    if existing:
        raise OutputExists(
            f"refusing to overwrite {', '.join(existing)} in {out_dir} (use --force)"
        )


def _pick_seed(args, cfg) -> int:
    return args.seed if args.seed is not None else cfg.seeds[0]


def _pick_iterations(args, cfg) -> int:
    n = args.iterations if args.iterations is not None else cfg.n_iterations
    if n < 1:
        raise ParameterError("iterations must be at least 1")
    return n


def cmd_run(args) -> int:
    """One simulation run: trajectory CSV, trades CSV, optional price chart."""
    cfg = load_config(args.config)
    seed = _pick_seed(args, cfg)
    iterations = _pick_iterations(args, cfg)
    filenames = ["trajectory.csv", "trades.csv"]
    if args.svg:
        filenames.append("avg_price.svg")
    _prepare_out(args.out, filenames, args.force)

    result = run(cfg.params, seed, iterations)
    write_trajectory_csv(args.out / "trajectory.csv", result.snapshots)
    write_trades_csv(args.out / "trades.csv", result.trades)
    series = result.avg_price_series()
    if args.svg:
        svg = line_chart_svg(
            [(f"start={cfg.params.initial_price:g}", series)],
            title=f"average selling price (seed {seed})",
            y_label="price",
        )
        (args.out / "avg_price.svg").write_text(svg)

    if len(series) >= cfg.convergence_window:
        rep = detect_convergence(
            series, cfg.convergence_window, cfg.convergence_cv_tolerance
        )
        print(
            f"converged={rep.converged} settled_value={rep.settled_value!r} "
            f"settle_iteration={rep.settle_iteration} trailing_cv={rep.trailing_cv!r}"
        )
    else:
        print(
            f"run shorter than the convergence window ({cfg.convergence_window}); "
            "no convergence assessment"
        )
    print(f"wrote {len(filenames)} files to {args.out}")
    return EXIT_OK


def _run_csv_name(start_price: float, seed: int) -> str:
    return f"trajectory_price{start_price:g}_seed{seed}.csv"


def cmd_sweep(args) -> int:
    """The attractor experiment: one run per (start_price, seed), compared."""
    cfg = load_config(args.config)
    seeds = (args.seed,) if args.seed is not None else cfg.seeds
    iterations = _pick_iterations(args, cfg)
    spec = SweepSpec(
        base_params=cfg.params,
        start_prices=cfg.start_prices,
        seeds=seeds,
        n_iterations=iterations,
        convergence_window=cfg.convergence_window,
        cv_tolerance=cfg.convergence_cv_tolerance,
    )
    filenames = ["sweep_summary.csv"]
    filenames += [_run_csv_name(sp, seed) for sp in spec.start_prices for seed in spec.seeds]
    if args.svg:
        filenames.append("sweep.svg")
    _prepare_out(args.out, filenames, args.force)

    report = run_sweep(spec)
    write_summary_csv(args.out / "sweep_summary.csv", report)
    for o in report.runs:
        if o.snapshots is not None:
            write_trajectory_csv(args.out / _run_csv_name(o.start_price, o.seed), o.snapshots)
        if o.report is None:
            print(f"start={o.start_price:g} seed={o.seed} failed: {o.error}")
        else:
            print(
                f"start={o.start_price:g} seed={o.seed} converged={o.report.converged} "
                f"settled_value={o.report.settled_value!r}"
            )
    if args.svg:
        first_seed = spec.seeds[0]
        curves = [
            (f"start={o.start_price:g}", o.avg_price_series())
            for o in report.runs
            if o.seed == first_seed and o.snapshots is not None
        ]
        if curves:
            svg = line_chart_svg(
                curves,
                title="average selling price from different starting prices",
                y_label="price",
            )
            (args.out / "sweep.svg").write_text(svg)

    try:
        passed, spread = compare_attractors(report, cfg.attractor_rel_tolerance)
    except ValueError as exc:
        print(f"attractor comparison failed: {exc}")
        return EXIT_ATTRACTOR
    print(
        f"attractor_spread={spread!r} tolerance={cfg.attractor_rel_tolerance:g} "
        f"-> {'pass' if passed else 'fail'}"
    )
    return EXIT_OK if passed else EXIT_ATTRACTOR


_PRICE_FACTORS = (DEEP_CUT, SMALL_CUT, SMALL_RAISE, STEEP_RAISE)


def audited_run(
    params: MarketParams, seed: int, n_iterations: int, tamper=None
) -> tuple[str | None, list[SnapshotRow], list[TradeRecord]]:
    """Step the reference engine, checking every invariant each iteration.

    Returns (violation, snapshots, trades); violation is None when clean.
    ``tamper`` is a test hook called with the state after each step, letting
    the audit itself be audited via deliberate corruption.
    """
    state, rng = init_economy(params, seed)
    initial_money = total_money(state)
    tolerance = 1e-9 * initial_money
    prev_prices = [a.price for a in state.agents]
    snapshots: list[SnapshotRow] = []
    trades: list[TradeRecord] = []

    for _ in range(n_iterations):
        new_trades, discarded = step(state, rng)
        if tamper is not None:
            tamper(state)
        snapshots.append(record_snapshot(state, len(new_trades), discarded))
        trades.extend(new_trades)
        it = state.iteration

        drift = abs(total_money(state) - initial_money)
        if drift > tolerance:
            return (
                f"money conservation broken at iteration {it}: "
                f"|total - {_fmt(initial_money)}| = {_fmt(drift)}",
                snapshots,
                trades,
            )
        for agent, old_price in zip(state.agents, prev_prices):
            if agent.savings < 0.0:
                return f"negative savings at iteration {it}: agent {agent.id}", snapshots, trades
            if not 0.0 <= agent.stock_for_sale <= params.max_stock:
                return (
                    f"stock out of bounds at iteration {it}: agent {agent.id} "
                    f"holds {_fmt(agent.stock_for_sale)}",
                    snapshots,
                    trades,
                )
            if agent.consumable < 0.0:
                return f"negative consumable at iteration {it}: agent {agent.id}", snapshots, trades
            if not agent.price > 0.0:
                return f"non-positive price at iteration {it}: agent {agent.id}", snapshots, trades
            if agent.price != old_price and agent.price not in tuple(
                old_price * f for f in _PRICE_FACTORS
            ):
                return (
                    f"price moved off the policy grid at iteration {it}: "
                    f"agent {agent.id} went {_fmt(old_price)} -> {_fmt(agent.price)}",
                    snapshots,
                    trades,
                )
        prev_prices = [a.price for a in state.agents]
    return None, snapshots, trades


def cmd_verify(args) -> int:
    """Invariant audit plus a byte-for-byte replay comparison.

    The audited pass always uses the pure-Python reference backend; the
    replay uses the default backend, so when the compiled kernel is present
    this also proves the two backends agree bit-for-bit.
    """
    cfg = load_config(args.config)
    seed = _pick_seed(args, cfg)
    iterations = _pick_iterations(args, cfg)

    violation, snapshots_a, trades_a = audited_run(cfg.params, seed, iterations)
    if violation is not None:
        print(f"invariant violated: {violation}")
        return EXIT_INVARIANT

    result = run(cfg.params, seed, iterations)
    same = trajectory_csv_text(snapshots_a) == trajectory_csv_text(
        result.snapshots
    ) and trades_csv_text(trades_a) == trades_csv_text(result.trades)
    if not same:
        print("determinism violated: replayed trajectory differs from the first pass")
        return EXIT_INVARIANT

    print(f"all invariants held over {iterations} iterations; replay byte-identical")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agora",
        description="Deterministic agent-based simulator of price discovery "
        "in a single-good fiat-money economy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("run", cmd_run, "execute one run and write trajectory/trades CSVs"),
        ("sweep", cmd_sweep, "run the start-price sweep and compare attractors"),
        ("verify", cmd_verify, "audit engine invariants and determinism"),
    )
    for name, handler, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="key = value config file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        p.add_argument(
            "--iterations", type=int, default=None, help="override the iteration count"
        )
        p.add_argument("--svg", action="store_true", help="also emit SVG charts")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
