"""Minimal deterministic SVG output for scatter plots and landscape heatmaps.

Hand-rolled on purpose: the files are tiny, byte-stable across runs, and
need no plotting dependency.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graphs import InstanceClass

__all__ = ["CLASS_COLORS", "svg_scatter", "svg_heatmap"]

# Fixed class -> color mapping (Okabe-Ito palette, colorblind safe).
CLASS_COLORS: dict[InstanceClass, str] = {
    InstanceClass.UNIFORM_RANDOM: "#0072B2",
    InstanceClass.POWER_LAW_TREE: "#E69F00",
    InstanceClass.WATTS_STROGATZ: "#009E73",
    InstanceClass.GEOMETRIC: "#CC79A7",
    InstanceClass.THREE_REGULAR: "#D55E00",
    InstanceClass.FOUR_REGULAR: "#56B4E9",
    InstanceClass.NEARLY_COMPLETE_BIPARTITE: "#000000",
}

_W, _H, _PAD = 640, 480, 50


def _axis_range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    margin = 0.05 * (hi - lo)
    return lo - margin, hi + margin


def svg_scatter(points, path: Path | str, title: str = "instance space") -> None:
    xs = [pt.z1 for pt in points]
    ys = [pt.z2 for pt in points]
    x_lo, x_hi = _axis_range(xs)
    y_lo, y_hi = _axis_range(ys)

    def sx(x: float) -> float:
        return _PAD + (x - x_lo) / (x_hi - x_lo) * (_W - 2 * _PAD)

    def sy(y: float) -> float:
        return _H - _PAD - (y - y_lo) / (y_hi - y_lo) * (_H - 2 * _PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-size="12">z1</text>',
        f'<text x="14" y="{_H / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_H / 2:.1f})">z2</text>',
    ]
    for pt in points:
        color = CLASS_COLORS[pt.instance_class]
        parts.append(
            f'<circle cx="{sx(pt.z1):.2f}" cy="{sy(pt.z2):.2f}" r="4" '
            f'fill="{color}" fill-opacity="0.75"/>'
        )
    present = [cls for cls in CLASS_COLORS if any(pt.instance_class is cls for pt in points)]
    for i, cls in enumerate(present):
        y = _PAD + 16 * i
        parts.append(f'<circle cx="{_W - 180}" cy="{y}" r="4" fill="{CLASS_COLORS[cls]}"/>')
        parts.append(f'<text x="{_W - 170}" y="{y + 4}" font-size="11">{cls.value}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _heat_color(t: float) -> str:
    """Piecewise-linear dark blue -> teal -> yellow ramp on t in [0,1]."""
    stops = [
        (0.0, (13, 8, 135)),
        (0.5, (33, 145, 140)),
        (1.0, (253, 231, 37)),
    ]
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(stops, stops[1:]):
        if t <= t1:
            w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + w * (b - a)) for a, b in zip(c0, c1))
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(253,231,37)"


def svg_heatmap(grid: np.ndarray, path: Path | str, title: str = "p=1 landscape") -> None:
    """Render a landscape grid; rows are gamma (vertical axis, increasing
    upward), columns are beta (horizontal)."""
    grid = np.asarray(grid, dtype=np.float64)
    rows, cols = grid.shape
    lo, hi = float(grid.min()), float(grid.max())
    span = hi - lo if hi > lo else 1.0
    cell_w = (_W - 2 * _PAD) / cols
    cell_h = (_H - 2 * _PAD) / rows
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-size="12">beta</text>',
        f'<text x="14" y="{_H / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_H / 2:.1f})">gamma</text>',
    ]
    for i in range(rows):
        y = _H - _PAD - (i + 1) * cell_h
        for j in range(cols):
            x = _PAD + j * cell_w
            color = _heat_color((grid[i, j] - lo) / span)
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w + 0.5:.2f}" '
                f'height="{cell_h + 0.5:.2f}" fill="{color}"/>'
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
