"""Dependency-free SVG plots of campaign series with error bars.

Deliberately hand-rolled: the output is deterministic and diffable, unlike
toolkit SVG which embeds ids and timestamps.
"""
from __future__ import annotations

import math
from pathlib import Path

from .campaign import CampaignResult

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 20, 28, 46

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

AXIS_LABELS = {"fuzz": "fuzz", "success": "pairing success rate", "diff": "diff (rad)"}


def _nice_ticks(lo: float, hi: float, want: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / want
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if mult * mag >= raw:
            step = mult * mag
            break
    first = step * math.ceil(lo / step)
    ticks = []
    t = first
    while t <= hi + 1e-12:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def render_plot(result: CampaignResult, metric: str, path) -> None:
    """Write an SVG: x = round, y = metric, one series per strategy, +-1 std bars."""
    if metric not in ("fuzz", "success", "diff"):
        raise ValueError(f"metric must be fuzz, success or diff, got {metric!r}")
    series = []
    for strategy in result.spec.strategies:
        strategy_series = result.series.get(strategy, {})
        for name in (metric, f"{metric}_mitigated"):
            if name in strategy_series:
                label = strategy if name == metric else f"{strategy} (mitigated)"
                series.append((label, strategy_series[name]))
    if not series:
        raise ValueError(f"result contains no {metric!r} series")

    rounds = result.spec.rounds
    y_lo, y_hi = 0.0, 0.0
    for _, arrays in series:
        for mean, std in zip(arrays["mean"], arrays["std"]):
            y_lo = min(y_lo, mean - std)
            y_hi = max(y_hi, mean + std)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def x_of(round_index: int) -> float:
        if rounds == 1:
            return MARGIN_L + plot_w / 2
        return MARGIN_L + plot_w * (round_index - 1) / (rounds - 1)

    def y_of(value: float) -> float:
        return MARGIN_T + plot_h * (1 - (value - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333"/>',
    ]

    for tick in _nice_ticks(y_lo, y_hi):
        y = y_of(tick)
        parts.append(f'<line x1="{MARGIN_L - 4}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" stroke="#333"/>')
        parts.append(f'<line x1="{MARGIN_L}" y1="{y:.2f}" x2="{MARGIN_L + plot_w}" y2="{y:.2f}" '
                     f'stroke="#ddd"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt(tick)}</text>')

    x_step = max(1, rounds // 10)
    for r in range(1, rounds + 1):
        if (r - 1) % x_step and r != rounds:
            continue
        x = x_of(r)
        parts.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + plot_h}" x2="{x:.2f}" '
                     f'y2="{MARGIN_T + plot_h + 4}" stroke="#333"/>')
        parts.append(f'<text x="{x:.2f}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle">{r}</text>')

    parts.append(f'<text x="{MARGIN_L + plot_w / 2}" y="{HEIGHT - 10}" text-anchor="middle">round</text>')
    label = AXIS_LABELS[metric]
    parts.append(f'<text x="16" y="{MARGIN_T + plot_h / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {MARGIN_T + plot_h / 2})">{label}</text>')

    for idx, (name, arrays) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        points = []
        for r, (mean, std) in enumerate(zip(arrays["mean"], arrays["std"]), start=1):
            x, y = x_of(r), y_of(mean)
            points.append(f"{x:.2f},{y:.2f}")
            if std > 0:
                y_top, y_bot = y_of(mean + std), y_of(mean - std)
                parts.append(f'<line x1="{x:.2f}" y1="{y_top:.2f}" x2="{x:.2f}" y2="{y_bot:.2f}" '
                             f'stroke="{color}" class="errorbar"/>')
                for y_cap in (y_top, y_bot):
                    parts.append(f'<line x1="{x - 3:.2f}" y1="{y_cap:.2f}" x2="{x + 3:.2f}" '
                                 f'y2="{y_cap:.2f}" stroke="{color}"/>')
        if len(points) > 1:
            parts.append(f'<polyline points="{" ".join(points)}" fill="none" stroke="{color}" '
                         f'stroke-width="1.5"/>')
        for point in points:
            x, y = point.split(",")
            parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')

    legend_y = MARGIN_T + 8
    for idx, (name, _) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        y = legend_y + 16 * idx
        parts.append(f'<rect x="{MARGIN_L + 10}" y="{y}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="{MARGIN_L + 28}" y="{y + 10}">{name}</text>')

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
