"""Small deterministic SVG plot writer.

Hand-rolled so identical data yields identical bytes across runs and
platforms. Linear or log10 y axis, optional symmetric error bars,
circle markers, one legend row per series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64.0, 16.0, 30.0, 46.0


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    yerr: Sequence[float] | None = None
    marker: bool = True
    dashed: bool = False


def _fmt(v: float) -> str:
    """Fixed two-decimal pixel coordinates, trailing zeros stripped."""
    s = f"{v:.2f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _label(v: float) -> str:
    return f"{v:.10g}"


def _linear_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if span / (mult * mag) <= target - 1 + 1e-9:
            step = mult * mag
            break
    start = math.ceil(lo / step - 1e-9)
    ticks = []
    i = start
    while i * step <= hi + 1e-9 * span:
        ticks.append(round(i * step, 12))
        i += 1
    return ticks or [lo]


def _log_ticks(lo: float, hi: float, target: int = 7) -> list[float]:
    d0 = math.floor(math.log10(lo) + 1e-12)
    d1 = math.ceil(math.log10(hi) - 1e-12)
    step = 1
    while (d1 - d0) // step + 1 > target:
        step += 1
    return [10.0**d for d in range(d0, d1 + 1, step)]


def render(
    series: Sequence[Series],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    yscale: str = "linear",
    width: float = 640.0,
    height: float = 440.0,
) -> str:
    if yscale not in ("linear", "log"):
        raise ValueError(f"yscale must be 'linear' or 'log', got {yscale!r}")
    if not series:
        raise ValueError("need at least one series")
    for s in series:
        if len(s.x) != len(s.y) or not s.x:
            raise ValueError(f"series {s.label!r} needs equal-length non-empty x and y")
        if s.yerr is not None and len(s.yerr) != len(s.y):
            raise ValueError(f"series {s.label!r} yerr length mismatch")
        for v in list(s.x) + list(s.y):
            if not math.isfinite(v):
                raise ValueError(f"series {s.label!r} contains non-finite values")
        if yscale == "log" and min(s.y) <= 0:
            raise ValueError("log scale requires positive y values")

    xs = [v for s in series for v in s.x]
    ylo_pts, yhi_pts = [], []
    for s in series:
        for i, v in enumerate(s.y):
            e = s.yerr[i] if s.yerr is not None else 0.0
            lo = v - e
            if yscale == "log" and lo <= 0:
                lo = v  # bar clamped at the axis floor later
            ylo_pts.append(lo)
            yhi_pts.append(v + e)
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ylo_pts), max(yhi_pts)
    if x0 == x1:
        x0, x1 = x0 - 1.0, x1 + 1.0
    else:
        pad = 0.05 * (x1 - x0)
        x0, x1 = x0 - pad, x1 + pad
    if yscale == "linear":
        if y0 == y1:
            y0, y1 = y0 - 1.0, y1 + 1.0
        else:
            pad = 0.08 * (y1 - y0)
            y0, y1 = y0 - pad, y1 + pad
    else:
        ly0, ly1 = math.log10(y0), math.log10(y1)
        if ly0 == ly1:
            ly0, ly1 = ly0 - 0.5, ly1 + 0.5
        else:
            pad = 0.08 * (ly1 - ly0)
            ly0, ly1 = ly0 - pad, ly1 + pad
        y0, y1 = 10.0**ly0, 10.0**ly1

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x0) / (x1 - x0) * plot_w

    def py(y: float) -> float:
        if yscale == "log":
            t = (math.log10(y) - math.log10(y0)) / (math.log10(y1) - math.log10(y0))
        else:
            t = (y - y0) / (y1 - y0)
        return height - _MARGIN_B - t * plot_h

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'font-family="Helvetica,Arial,sans-serif" font-size="12">'
    )
    out.append(f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>')
    out.append(
        f'<rect x="{_fmt(_MARGIN_L)}" y="{_fmt(_MARGIN_T)}" width="{_fmt(plot_w)}" '
        f'height="{_fmt(plot_h)}" fill="none" stroke="#333333"/>'
    )

    xticks = _linear_ticks(x0, x1)
    yticks = _log_ticks(y0, y1) if yscale == "log" else _linear_ticks(y0, y1)
    for t in xticks:
        if not x0 <= t <= x1:
            continue
        gx = px(t)
        out.append(
            f'<line x1="{_fmt(gx)}" y1="{_fmt(_MARGIN_T)}" x2="{_fmt(gx)}" '
            f'y2="{_fmt(height - _MARGIN_B)}" stroke="#dddddd"/>'
        )
        out.append(
            f'<text x="{_fmt(gx)}" y="{_fmt(height - _MARGIN_B + 16)}" '
            f'text-anchor="middle">{_label(t)}</text>'
        )
    for t in yticks:
        if not y0 <= t <= y1:
            continue
        gy = py(t)
        out.append(
            f'<line x1="{_fmt(_MARGIN_L)}" y1="{_fmt(gy)}" x2="{_fmt(width - _MARGIN_R)}" '
            f'y2="{_fmt(gy)}" stroke="#dddddd"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_L - 6)}" y="{_fmt(gy + 4)}" '
            f'text-anchor="end">{_label(t)}</text>'
        )
    if title:
        out.append(
            f'<text x="{_fmt(width / 2)}" y="18" text-anchor="middle" '
            f'font-size="14">{_escape(title)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" y="{_fmt(height - 10)}" '
            f'text-anchor="middle">{_escape(xlabel)}</text>'
        )
    if ylabel:
        cx, cy = 14.0, _MARGIN_T + plot_h / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{_escape(ylabel)}</text>'
        )

    for si, s in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.x, s.y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        if s.yerr is not None:
            for x, y, e in zip(s.x, s.y, s.yerr):
                lo = y - e
                if yscale == "log" and lo <= y0:
                    lo = y0
                gx, gy0, gy1 = px(x), py(max(lo, y0)), py(min(y + e, y1))
                out.append(
                    f'<line x1="{_fmt(gx)}" y1="{_fmt(gy0)}" x2="{_fmt(gx)}" '
                    f'y2="{_fmt(gy1)}" stroke="{color}"/>'
                )
                for gy in (gy0, gy1):
                    out.append(
                        f'<line x1="{_fmt(gx - 3)}" y1="{_fmt(gy)}" x2="{_fmt(gx + 3)}" '
                        f'y2="{_fmt(gy)}" stroke="{color}"/>'
                    )
        if s.marker:
            for x, y in zip(s.x, s.y):
                out.append(
                    f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" '
                    f'fill="{color}"/>'
                )

    lx, ly = width - _MARGIN_R - 150.0, _MARGIN_T + 8.0
    for si, s in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        ry = ly + 16.0 * si
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ry)}" x2="{_fmt(lx + 22)}" '
            f'y2="{_fmt(ry)}" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        out.append(f'<text x="{_fmt(lx + 28)}" y="{_fmt(ry + 4)}">{_escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
