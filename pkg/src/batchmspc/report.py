"""Dependency-free SVG control charts on a logarithmic vertical axis."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyChartError, IoFailureError
from .mspc import ChartTable, Status, read_chart_csv

WIDTH, HEIGHT = 720, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45
STATUS_COLOURS = {
    Status.IN_CONTROL: "#1f77b4",
    Status.WARNING: "#ff9f1c",
    Status.ALARM: "#d62728",
}


@dataclass
class RunReport:
    chart_csv: Path
    summary: dict[str, dict[str, int]]
    svg_paths: list[Path] = field(default_factory=list)

    @property
    def n_batches(self) -> int:
        return sum(self.summary["t2"].values())

    @property
    def any_alarm(self) -> bool:
        return self.summary["t2"]["Alarm"] + self.summary["spex"]["Alarm"] > 0


def summarize(table: ChartTable) -> dict[str, dict[str, int]]:
    out = {}
    for name, statuses in (("t2", table.t2_status), ("spex", table.spex_status)):
        out[name] = {s.label: sum(1 for x in statuses if x == s) for s in Status}
    return out


def decade_ticks(lo: float, hi: float) -> list[float]:
    """Powers of ten spanning [lo, hi] (both positive)."""
    a = math.floor(math.log10(lo))
    b = math.ceil(math.log10(hi))
    if a == b:
        b += 1
    return [10.0**e for e in range(a, b + 1)]


def _fmt_tick(v: float) -> str:
    return f"1e{int(round(math.log10(v))):+d}".replace("+", "")


def render_svg(
    values: np.ndarray,
    statuses: list[Status],
    warning: float,
    alarm: float,
    title: str,
    batch_index: np.ndarray | None = None,
) -> str:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyChartError("nothing to plot")
    if batch_index is None:
        batch_index = np.arange(values.size)
    positive = values[values > 0]
    floor = positive.min() if positive.size else min(warning, alarm)
    # zeros cannot sit on a log axis; they are drawn on the lowest decade
    lo = min(floor, warning, alarm)
    hi = max(values.max(), warning, alarm)
    ticks = decade_ticks(lo, hi)
    log_lo, log_hi = math.log10(ticks[0]), math.log10(ticks[-1])
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def y(v: float) -> float:
        v = max(v, ticks[0])
        return MARGIN_T + plot_h * (1 - (math.log10(v) - log_lo) / (log_hi - log_lo))

    span = max(1, values.size - 1)

    def x(i: int) -> float:
        return MARGIN_L + plot_w * i / span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-yscale="log">',
        f'<title>{title}</title>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444"/>',
    ]
    for t in ticks:
        ty = y(t)
        parts.append(
            f'<line class="gridline" x1="{MARGIN_L}" x2="{MARGIN_L + plot_w}" y1="{ty:.2f}" '
            f'y2="{ty:.2f}" stroke="#ddd"/>'
        )
        parts.append(
            f'<text class="tick" data-value="{t:g}" x="{MARGIN_L - 6}" y="{ty + 4:.2f}" '
            f'text-anchor="end" font-size="11">{_fmt_tick(t)}</text>'
        )
    for cls, value, colour in (("warning", warning, "#ff9f1c"), ("alarm", alarm, "#d62728")):
        ly = y(value)
        parts.append(
            f'<line class="limit {cls}" data-value="{value:.17g}" x1="{MARGIN_L}" '
            f'x2="{MARGIN_L + plot_w}" y1="{ly:.2f}" y2="{ly:.2f}" stroke="{colour}" '
            'stroke-dasharray="6 4"/>'
        )
    path = " ".join(f"{x(i):.2f},{y(v):.2f}" for i, v in enumerate(values))
    parts.append(f'<polyline points="{path}" fill="none" stroke="#888" stroke-width="1"/>')
    for i, (v, s) in enumerate(zip(values, statuses)):
        parts.append(
            f'<circle class="point {s.label.lower()}" data-batch="{int(batch_index[i])}" '
            f'data-value="{v:.17g}" cx="{x(i):.2f}" cy="{y(v):.2f}" r="3" '
            f'fill="{STATUS_COLOURS[s]}"/>'
        )
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle" '
        'font-size="12">batch</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report(chart_csv: str | os.PathLike, out_dir: str | os.PathLike) -> RunReport:
    chart_csv = Path(chart_csv)
    try:
        table = read_chart_csv(chart_csv)
    except FileNotFoundError as exc:
        raise IoFailureError(str(exc)) from exc
    if len(table) == 0:
        raise EmptyChartError(f"{chart_csv} holds no chart points")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    svgs = []
    lim = table.limits
    for name, title, values, statuses in (
        ("t2", "Hotelling T^2", table.t2, table.t2_status),
        ("spex", "SPEx", table.spex, table.spex_status),
    ):
        svg = render_svg(
            values, statuses, lim[f"{name}_warning"], lim[f"{name}_alarm"], title, table.batch_index
        )
        path = out_dir / f"{name}_chart.svg"
        try:
            path.write_text(svg, encoding="utf-8")
        except OSError as exc:
            raise IoFailureError(str(exc)) from exc
        svgs.append(path)
    return RunReport(chart_csv, summarize(table), svgs)
