"""Flat key = value configuration files for runs and sweeps.

Format: one ``key = value`` per line; blank lines and lines starting with
``#`` are ignored. List values (start_prices, seeds) are comma-separated.
Unknown keys are a hard error so a typo in a sweep config cannot silently
fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .core import MarketParams, ParameterError, validate_params

__all__ = ["FileConfig", "load_config", "parse_entries", "config_from_entries"]

_PARAM_FIELDS = {f.name for f in fields(MarketParams)}
_INT_FIELDS = {"n_agents", "min_price_change_period", "sellers_sampled", "n_iterations", "convergence_window"}


@dataclass(frozen=True)
class FileConfig:
    """Everything a CLI command needs: market parameters plus experiment settings.

    The sweep defaults reproduce the headline experiment: four starting
    prices spanning two orders of magnitude, three seeds each.
    """

    params: MarketParams
    start_prices: tuple[float, ...] = (0.2, 1.0, 5.0, 25.0)
    seeds: tuple[int, ...] = (1, 2, 3)
    n_iterations: int = 5000
    convergence_window: int = 500
    convergence_cv_tolerance: float = 0.02
    attractor_rel_tolerance: float = 0.10


def parse_entries(text: str) -> dict[str, str]:
    """Parse the flat file into raw string entries, rejecting malformed lines."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParameterError(f"config line {lineno}: missing key")
        if key in entries:
            raise ParameterError(f"config line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _convert(key: str, value: str):
    try:
        if key in ("start_prices", "seeds"):
            items = [tok.strip() for tok in value.split(",") if tok.strip()]
            if key == "seeds":
                return tuple(int(tok) for tok in items)
            return tuple(float(tok) for tok in items)
        if key in _INT_FIELDS:
            return int(value)
        return float(value)
    except ValueError:
        raise ParameterError(f"config key {key!r}: cannot parse value {value!r}") from None


def config_from_entries(entries: dict[str, str]) -> FileConfig:
    unknown = sorted(set(entries) - _PARAM_FIELDS - {
        "start_prices",
        "seeds",
        "n_iterations",
        "convergence_window",
        "convergence_cv_tolerance",
        "attractor_rel_tolerance",
    })
    if unknown:
        raise ParameterError(f"unknown config keys: {', '.join(unknown)}")

    param_kwargs = {}
    other_kwargs = {}
    for key, value in entries.items():
        converted = _convert(key, value)
        if key in _PARAM_FIELDS:
            param_kwargs[key] = converted
        else:
            other_kwargs[key] = converted

    params = MarketParams(**param_kwargs)
    violations = validate_params(params)
    if violations:
        raise ParameterError("; ".join(violations))

    cfg = FileConfig(params=params, **other_kwargs)
    if not cfg.start_prices:
        raise ParameterError("start_prices must not be empty")
    if not cfg.seeds:
        raise ParameterError("seeds must not be empty")
    if cfg.n_iterations < 1:
        raise ParameterError("n_iterations must be at least 1")
    if cfg.convergence_window < 2:
        raise ParameterError("convergence_window must span at least 2 points")
    if not cfg.convergence_cv_tolerance > 0:
        raise ParameterError("convergence_cv_tolerance must be > 0")
    if not cfg.attractor_rel_tolerance >= 0:
        raise ParameterError("attractor_rel_tolerance must be >= 0")
    return cfg


def load_config(path: str | Path | None) -> FileConfig:
    """Load a config file, or the built-in defaults when no path is given."""
    if path is None:
        return FileConfig(params=MarketParams())
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"config file not found: {path}")
    return config_from_entries(parse_entries(path.read_text()))
