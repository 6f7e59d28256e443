"""Minimal static SVG charts, no plotting dependencies.

These are for eyeballing runs; the CSV files remain the authoritative
output.  Only what the CLI needs: multi-series line charts and a heatmap.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

__all__ = ["line_chart", "heatmap"]

_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
]
_W, _H = 880, 520
_ML, _MR, _MT, _MB = 70, 20, 40, 55


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * abs(step):
        ticks.append(0.0 if abs(v) < 1e-15 else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


class _Frame:
    """Pixel mapping plus shared axis/label boilerplate."""

    def __init__(self, xlo, xhi, ylo, yhi, title, xlabel, ylabel):
        self.xlo, self.xhi = xlo, xhi
        self.ylo, self.yhi = ylo, yhi
        pad = 0.05 * (yhi - ylo or 1.0)
        self.ylo -= pad
        self.yhi += pad
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="13">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
            f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
            f'<text x="18" y="{(_MT + _H - _MB) / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {(_MT + _H - _MB) / 2:.0f})">{ylabel}</text>',
        ]

    def px(self, x: float) -> float:
        span = self.xhi - self.xlo or 1.0
        return _ML + (x - self.xlo) / span * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        span = self.yhi - self.ylo or 1.0
        return _H - _MB - (y - self.ylo) / span * (_H - _MT - _MB)

    def axes(self) -> None:
        x0, x1 = _ML, _W - _MR
        y0, y1 = _MT, _H - _MB
        self.parts.append(
            f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" '
            f'fill="none" stroke="black"/>'
        )
        for v in _ticks(self.xlo, self.xhi):
            px = self.px(v)
            self.parts.append(f'<line x1="{px:.1f}" y1="{y1}" x2="{px:.1f}" y2="{y1 + 5}" stroke="black"/>')
            self.parts.append(f'<text x="{px:.1f}" y="{y1 + 20}" text-anchor="middle">{_fmt(v)}</text>')
        for v in _ticks(self.ylo, self.yhi):
            py = self.py(v)
            self.parts.append(f'<line x1="{x0 - 5}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>')
            self.parts.append(f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end">{_fmt(v)}</text>')

    def save(self, path) -> None:
        self.parts.append("</svg>")
        Path(path).write_text("\n".join(self.parts), encoding="utf-8")


def line_chart(path, x, series: dict[str, np.ndarray], title="", xlabel="", ylabel="") -> None:
    """Write a multi-series line chart; ``series`` maps legend label to y values."""
    x = np.asarray(x, dtype=float)
    ylo = min(float(np.min(v)) for v in series.values())
    yhi = max(float(np.max(v)) for v in series.values())
    fr = _Frame(float(x[0]), float(x[-1]), ylo, yhi, title, xlabel, ylabel)
    fr.axes()
    # thin long traces so files stay small; 1600 points are plenty for 880 px
    step = max(1, x.size // 1600)
    for k, (label, y) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(
            f"{fr.px(float(xi)):.1f},{fr.py(float(yi)):.1f}"
            for xi, yi in zip(x[::step], np.asarray(y, dtype=float)[::step])
        )
        fr.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MT + 16 + 16 * k
        fr.parts.append(f'<line x1="{_W - _MR - 130}" y1="{ly}" x2="{_W - _MR - 105}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        fr.parts.append(f'<text x="{_W - _MR - 100}" y="{ly + 4}">{label}</text>')
    fr.save(path)


def _viridis(v: float) -> str:
    stops = [
        (0.267, 0.005, 0.329), (0.283, 0.141, 0.458), (0.254, 0.265, 0.530),
        (0.207, 0.372, 0.553), (0.164, 0.471, 0.558), (0.128, 0.567, 0.551),
        (0.135, 0.659, 0.518), (0.267, 0.749, 0.441), (0.478, 0.821, 0.318),
        (0.741, 0.873, 0.150), (0.993, 0.906, 0.144),
    ]
    v = min(max(v, 0.0), 1.0) * (len(stops) - 1)
    i = min(int(v), len(stops) - 2)
    f = v - i
    rgb = [stops[i][c] * (1 - f) + stops[i + 1][c] * f for c in range(3)]
    return "#" + "".join(f"{int(255 * c):02x}" for c in rgb)


def heatmap(path, x, y, z: np.ndarray, title="", xlabel="", ylabel="", zlo=0.0, zhi=1.0) -> None:
    """Write a heatmap of z[j, i] over columns x[i] and rows y[j]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    fr = _Frame(float(x[0]), float(x[-1]), float(y[0]), float(y[-1]), title, xlabel, ylabel)
    # cap the rendered resolution; the CSV holds the full grid
    sx = max(1, x.size // 220)
    sy = max(1, y.size // 220)
    xs, ys, zs = x[::sx], y[::sy], z[::sy, ::sx]
    for j in range(ys.size):
        y0 = fr.py(float(ys[j]))
        y1 = fr.py(float(ys[j + 1])) if j + 1 < ys.size else fr.py(fr.yhi)
        for i in range(xs.size):
            x0 = fr.px(float(xs[i]))
            x1 = fr.px(float(xs[i + 1])) if i + 1 < xs.size else fr.px(fr.xhi)
            v = (zs[j, i] - zlo) / (zhi - zlo or 1.0)
            fr.parts.append(
                f'<rect x="{x0:.1f}" y="{min(y0, y1):.1f}" width="{abs(x1 - x0) + 0.5:.1f}" '
                f'height="{abs(y0 - y1) + 0.5:.1f}" fill="{_viridis(v)}"/>'
            )
    fr.axes()
    fr.save(path)
