"""Standalone SVG line chart of the cumulative decomposition.

Hand-assembled XML: no plotting dependency, byte-deterministic output,
easy to diff in tests.  One polyline per cumulative series (six in total),
identified by ``id="series-<column>"``, plus a date axis and a legend.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .decomposition import CumulativeFrame, validate_cumulative
from .errors import InsufficientDataError

WIDTH, HEIGHT = 960.0, 540.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70.0, 24.0, 46.0, 58.0

SERIES_STYLE = (
    # (attribute name on CumulativeFrame, legend label, color, stroke width)
    ("di5y_change_cum", "DI5Y change (cum)", "#111111", 2.2),
    ("const_cum", "Constant", "#999999", 1.4),
    ("macro_cum", "Macro / central bank", "#1f77b4", 1.4),
    ("riscobr_cum", "Brazil risk", "#d62728", 1.4),
    ("global_cum", "Global risk", "#2ca02c", 1.4),
    ("residual_cum", "Residual", "#9467bd", 1.4),
)

__all__ = ["emit_svg", "SERIES_STYLE"]


def _nice_step(span: float, target_ticks: int = 6) -> float:
    raw = span / max(target_ticks, 1)
    mag = 10.0 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            return mult * mag
    return 10.0 * mag


def _axis_ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 else v)
        v += step
    return ticks


def emit_svg(cum: CumulativeFrame, path: Path | str, title: str = "Cumulative decomposition (bps)") -> None:
    """Render the six cumulative series to a well-formed standalone SVG file.

    The additive identity is cross-checked on every row before anything is
    rendered, so a chart is never produced from inconsistent accounting.
    """
    if cum.n_rows < 2:
        raise InsufficientDataError(
            f"emit_svg: need at least 2 rows, got {cum.n_rows}"
        )
    validate_cumulative(cum)

    x0 = cum.dates[0].toordinal()
    x1 = cum.dates[-1].toordinal()
    xspan = max(x1 - x0, 1)
    values = [getattr(cum, name) for name, *_ in SERIES_STYLE]
    lo = min(float(v.min()) for v in values)
    hi = max(float(v.max()) for v in values)
    pad = 0.05 * (hi - lo) or 1.0
    lo, hi = lo - pad, hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(d) -> float:
        return MARGIN_L + plot_w * (d.toordinal() - x0) / xspan

    def sy(v: float) -> float:
        return MARGIN_T + plot_h * (hi - v) / (hi - lo)

    parts: list[str] = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" '
        f'height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">'
    )
    parts.append(f"<title>{escape(title)}</title>")
    parts.append(
        f'<rect x="0" y="0" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="#ffffff"/>'
    )
    parts.append(
        f'<text x="{MARGIN_L:.1f}" y="24" font-family="sans-serif" font-size="16" '
        f'fill="#111111">{escape(title)}</text>'
    )

    # horizontal grid and y labels
    for tick in _axis_ticks(lo, hi):
        y = sy(tick)
        parts.append(
            f'<line x1="{MARGIN_L:.1f}" y1="{y:.2f}" x2="{WIDTH - MARGIN_R:.1f}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8:.1f}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" fill="#444444" text-anchor="end">{tick:g}</text>'
        )

    # date axis: at most 8 evenly spaced tick labels
    n_ticks = min(8, cum.n_rows)
    for i in range(n_ticks):
        idx = round(i * (cum.n_rows - 1) / max(n_ticks - 1, 1))
        d = cum.dates[idx]
        x = sx(d)
        parts.append(
            f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN_B:.1f}" x2="{x:.2f}" '
            f'y2="{HEIGHT - MARGIN_B + 5:.1f}" stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 20:.1f}" font-family="sans-serif" '
            f'font-size="11" fill="#444444" text-anchor="middle">{d.isoformat()}</text>'
        )
    parts.append(
        f'<line x1="{MARGIN_L:.1f}" y1="{HEIGHT - MARGIN_B:.1f}" '
        f'x2="{WIDTH - MARGIN_R:.1f}" y2="{HEIGHT - MARGIN_B:.1f}" '
        f'stroke="#444444" stroke-width="1"/>'
    )

    for name, label, color, width in SERIES_STYLE:
        pts = " ".join(
            f"{sx(d):.2f},{sy(float(v)):.2f}"
            for d, v in zip(cum.dates, getattr(cum, name))
        )
        parts.append(
            f'<polyline id="series-{name}" fill="none" stroke="{color}" '
            f'stroke-width="{width:g}" points="{pts}"/>'
        )

    # legend, one entry per series, laid out in two rows
    per_row = 3
    for i, (name, label, color, _) in enumerate(SERIES_STYLE):
        lx = MARGIN_L + (i % per_row) * 260.0
        ly = HEIGHT - 26.0 + (i // per_row) * 14.0
        parts.append(
            f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 22:.1f}" y2="{ly - 4:.1f}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        parts.append(
            f'<text x="{lx + 28:.1f}" y="{ly:.1f}" font-family="sans-serif" '
            f'font-size="11" fill="#111111">{escape(label)}</text>'
        )

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
