"""CSV trace files and standalone SVG line charts."""
from __future__ import annotations

import csv
import math
import os
from xml.sax.saxutils import escape

import numpy as np

CSV_COLUMNS = ("k", "action1", "action2", "r1_1", "r2_1", "q1_1", "q2_1",
               "beta1_1", "beta2_1", "eta")
INTEGER_COLUMNS = ("k", "action1", "action2")


class TraceIOError(OSError):
    pass


def _columns(source) -> dict:
    if hasattr(source, "as_columns"):
        return source.as_columns()
    if isinstance(source, (str, os.PathLike)):
        return read_trace(source)
    return dict(source)


def _fmt(name, value) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    if name in INTEGER_COLUMNS:
        return str(int(value))
    return f"{value:.12g}"


def emit_trace(source, path) -> int:
    """Write a trace as CSV; returns the number of data rows.

    ``source`` is anything with ``as_columns()`` (run results, mean and flow
    trajectories) or a mapping of column name to values. Missing or NaN
    fields are written empty.
    """
    cols = _columns(source)
    n = len(cols["k"])
    empty = [None] * n
    data = [cols.get(name, empty) for name in CSV_COLUMNS]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for i in range(n):
                writer.writerow([_fmt(name, col[i]) for name, col in zip(CSV_COLUMNS, data)])
    except OSError as exc:
        raise TraceIOError(f"cannot write trace to {path}: {exc.strerror or exc}") from exc
    return n


def read_trace(path) -> dict[str, np.ndarray]:
    """Read a trace CSV back into float arrays (empty fields become NaN)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise TraceIOError(f"cannot read trace {path}: {exc.strerror or exc}") from exc
    return {name: np.array([float(r[name]) if r[name] != "" else np.nan for r in rows])
            for name in CSV_COLUMNS}


# plot geometry, in SVG user units
WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 150, 30, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
MAX_POINTS = 2000


def plot_transform(x_range, y_range):
    """Map data coordinates to SVG coordinates for the plotting area."""
    (x0, x1), (y0, y1) = x_range, y_range
    w, h = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0

    def to_svg(x, y):
        return LEFT + (x - x0) / xspan * w, TOP + (y1 - y) / yspan * h

    return to_svg


def _thin(n: int) -> np.ndarray:
    if n <= MAX_POINTS:
        return np.arange(n)
    idx = np.unique(np.linspace(0, n - 1, MAX_POINTS).round().astype(int))
    return idx


def render_svg(source, path, columns=("r1_1", "r2_1"), references=None,
               title: str = "", ylim=(0.0, 1.0), labels=None) -> None:
    """Render selected trace columns against step ``k`` as an SVG 1.1 chart.

    ``references`` maps a label to a y value drawn as a dashed horizontal
    line (e.g. equilibrium components). Long traces are thinned to about
    2000 evenly spaced points, always keeping the last one.
    """
    cols = _columns(source)
    if not columns:
        raise ValueError("select at least one column")
    k = np.asarray(cols["k"], dtype=float)
    if k.size == 0:
        raise ValueError("cannot plot an empty trace")
    for c in columns:
        if c not in cols:
            raise ValueError(f"unknown column {c!r}")
    labels = labels or {}
    x_range = (float(k[0]), float(k[-1]))
    to_svg = plot_transform(x_range, ylim)
    idx = _thin(k.size)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    x0, y0 = to_svg(x_range[0], ylim[0])
    x1, y1 = to_svg(x_range[1], ylim[1])
    out.append(f'<rect x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" height="{y0 - y1:.2f}" '
               'fill="none" stroke="black" stroke-width="1"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = ylim[0] + frac * (ylim[1] - ylim[0])
        _, ys = to_svg(x_range[0], yv)
        out.append(f'<text x="{x0 - 6:.2f}" y="{ys + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{yv:.4g}</text>')
        xv = x_range[0] + frac * (x_range[1] - x_range[0])
        xs, _ = to_svg(xv, ylim[0])
        xlabel = f"{xv:.0f}" if x_range[1] - x_range[0] >= 10 else f"{xv:.3g}"
        out.append(f'<text x="{xs:.2f}" y="{y0 + 16:.2f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{xlabel}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle" '
               'font-family="sans-serif" font-size="12">step k</text>')

    legend = []
    for i, name in enumerate(columns):
        color = PALETTE[i % len(PALETTE)]
        y = np.asarray(cols[name], dtype=float)[idx]
        pts = [to_svg(xv, yv) for xv, yv in zip(k[idx], y) if not math.isnan(yv)]
        if len(pts) == 1:
            out.append(f'<circle data-column="{name}" cx="{pts[0][0]:.3f}" cy="{pts[0][1]:.3f}" '
                       f'r="3" fill="{color}"/>')
        elif pts:
            coords = " ".join(f"{px:.3f},{py:.3f}" for px, py in pts)
            out.append(f'<polyline data-column="{name}" points="{coords}" fill="none" '
                       f'stroke="{color}" stroke-width="1.2"/>')
        legend.append((labels.get(name, name), color, False))

    # references go on top so they stay visible under dense series
    for label, value in (references or {}).items():
        xa, ya = to_svg(x_range[0], value)
        xb, _ = to_svg(x_range[1], value)
        out.append(f'<line class="reference" x1="{xa:.2f}" y1="{ya:.2f}" x2="{xb:.2f}" '
                   f'y2="{ya:.2f}" stroke="black" stroke-dasharray="4 3" stroke-width="1"/>')
        legend.append((label, "black", True))

    lx = x1 + 12
    for j, (label, color, dashed) in enumerate(legend):
        ly = y1 + 14 + 18 * j
        dash = ' stroke-dasharray="4 3"' if dashed else ""
        out.append(f'<line x1="{lx:.2f}" y1="{ly:.2f}" x2="{lx + 20:.2f}" y2="{ly:.2f}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 26:.2f}" y="{ly + 4:.2f}" font-family="sans-serif" '
                   f'font-size="11">{escape(str(label))}</text>')
    out.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise TraceIOError(f"cannot write SVG to {path}: {exc.strerror or exc}") from exc
