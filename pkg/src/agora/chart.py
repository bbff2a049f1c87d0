"""Hand-rolled SVG line charts.

Charts are generated as plain text with one polyline vertex per data point,
so they are a pure function of the input series and can be regression-tested
byte-for-byte. No plotting library is involved.
"""

from __future__ import annotations

from typing import Sequence

__all__ = ["line_chart_svg"]

PALETTE = ("#1b6ca8", "#d1495b", "#3a7d44", "#8d5a97", "#c77d2f", "#4a4e69")

_MARGIN_LEFT = 74.0
_MARGIN_RIGHT = 18.0
_MARGIN_TOP = 42.0
_MARGIN_BOTTOM = 46.0


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def line_chart_svg(
    series: Sequence[tuple[str, Sequence[float]]],
    title: str,
    y_label: str,
    x_label: str = "iteration",
    width: int = 880,
    height: int = 520,
) -> str:
    """Render labelled series as an SVG line chart (x = 1..len(series))."""
    if not series or any(len(ys) == 0 for _, ys in series):
        raise ValueError("chart needs at least one non-empty series")

    x_max = max(len(ys) for _, ys in series)
    y_min = min(min(ys) for _, ys in series)
    y_max = max(max(ys) for _, ys in series)
    pad = (y_max - y_min) * 0.05
    if pad == 0.0:
        pad = abs(y_max) * 0.05 or 1.0
    y_min -= pad
    y_max += pad

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - 1.0) / max(x_max - 1.0, 1.0) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]

    # Axes with a handful of ticks.
    x0, y0 = _MARGIN_LEFT, _MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(_MARGIN_TOP)}" x2="{_fmt(x0)}" y2="{_fmt(y0)}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0 + plot_w)}" y2="{_fmt(y0)}" '
        f'stroke="black" stroke-width="1"/>'
    )
    for i in range(5):
        frac = i / 4.0
        y_val = y_min + (y_max - y_min) * frac
        ty = sy(y_val)
        parts.append(
            f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(ty)}" x2="{_fmt(x0)}" y2="{_fmt(ty)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x0 - 8)}" y="{_fmt(ty + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{y_val:.6g}</text>'
        )
        x_val = 1 + (x_max - 1) * frac
        tx = sx(x_val)
        parts.append(
            f'<line x1="{_fmt(tx)}" y1="{_fmt(y0)}" x2="{_fmt(tx)}" y2="{_fmt(y0 + 4)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(tx)}" y="{_fmt(y0 + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{x_val:.6g}</text>'
        )
    parts.append(
        f'<text x="{_fmt(x0 + plot_w / 2)}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(_MARGIN_TOP + plot_h / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_fmt(_MARGIN_TOP + plot_h / 2)})">{y_label}</text>'
    )

    for k, (label, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        points = " ".join(f"{_fmt(sx(i + 1))},{_fmt(sy(y))}" for i, y in enumerate(ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"/>'
        )
        lx = x0 + 10 + 150 * k
        parts.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(_MARGIN_TOP - 8)}" x2="{_fmt(lx + 18)}" '
            f'y2="{_fmt(_MARGIN_TOP - 8)}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 24)}" y="{_fmt(_MARGIN_TOP - 4)}" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
