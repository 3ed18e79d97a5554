"""Render simulation sweep CSVs into per-scheme throughput figures.

Input is the stable CSV schema emitted by the simulation harness: one row
per (scheme, axis point) cell with mean sum throughput, a 95% confidence
half-width, and optional analytical bound columns. This module reads only
the CSV (and nothing from the simulator's process), so it can plot results
produced anywhere.
"""

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class PlotgenError(Exception):
    """Base class for all errors raised by this package."""


class SchemaMismatchError(PlotgenError):
    """The CSV is missing columns the figure needs."""


class EmptyInputError(PlotgenError):
    """The CSV has a header but no data rows."""


# Columns every figure needs; bound columns are optional extras.
REQUIRED_COLUMNS = ("scheme", "mean_rlim", "rlim_half_width")
BOUND_COLUMNS = ("r_per", "r_low")

# Fixed drawing order and colors so the same CSV always renders the same
# figure regardless of row order.
_SERIES_STYLE = {
    "DFS": ("tab:blue", "o"),
    "HDS1": ("tab:green", "s"),
    "HDS2": ("tab:orange", "^"),
    "CVQ": ("tab:red", "v"),
    "RB": ("tab:gray", "x"),
}
_FALLBACK_COLORS = ("tab:purple", "tab:brown", "tab:pink", "tab:olive",
                    "tab:cyan")

_AXIS_LABELS = {
    "budget": "sum feedback bits",
    "p_db": "transmit SNR (dB)",
    "eps": "transmit correlation magnitude",
    "delta2": "shadowing log-variance",
}


@dataclass(frozen=True)
class FigureSpec:
    """Everything needed to render one figure from one CSV."""

    csv_path: str
    axis: str
    out_path: str
    bands: bool = False
    series: str = "scheme"

    def __post_init__(self):
        if not self.axis:
            raise ValueError("axis column must be nonempty")


def _read_rows(spec: FigureSpec) -> list:
    with open(spec.csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise EmptyInputError(f"{spec.csv_path} is empty")
        missing = [c for c in (*REQUIRED_COLUMNS, spec.axis, spec.series)
                   if c not in header]
        if missing:
            raise SchemaMismatchError(
                f"{spec.csv_path} lacks column(s) {missing}; header is {header}"
            )
        rows = list(reader)
    if not rows:
        raise EmptyInputError(f"{spec.csv_path} has no data rows")
    return rows


def _number(row: dict, col: str, path: str) -> float:
    try:
        return float(row[col])
    except ValueError as exc:
        raise SchemaMismatchError(
            f"{path}: column {col!r} holds non-numeric value {row[col]!r}"
        ) from exc


def _series_points(rows, spec):
    """Group rows by series value; each series sorted along the axis."""
    grouped = {}
    for row in rows:
        key = row[spec.series]
        x = _number(row, spec.axis, spec.csv_path)
        y = _number(row, "mean_rlim", spec.csv_path)
        hw = _number(row, "rlim_half_width", spec.csv_path)
        grouped.setdefault(key, []).append((x, y, hw))
    for pts in grouped.values():
        pts.sort()
    return grouped


def _bound_curves(rows, spec):
    """Per-axis-point bound values, de-duplicated across schemes.

    Rows produced without bound evaluation carry NaN; those points are
    simply dropped rather than plotted as gaps at zero.
    """
    curves = {}
    for col in BOUND_COLUMNS:
        if not rows or col not in rows[0]:
            continue
        pts = {}
        for row in rows:
            val = _number(row, col, spec.csv_path)
            if math.isfinite(val):
                x = _number(row, spec.axis, spec.csv_path)
                pts[x] = max(val, pts.get(x, -math.inf))
        if pts:
            curves[col] = sorted(pts.items())
    return curves


def render(spec: FigureSpec) -> str:
    """Draw the figure described by ``spec`` and return the output path.

    One line per scheme (optionally with a shaded 95% confidence band),
    plus dashed lines for any finite analytical bound columns.
    """
    rows = _read_rows(spec)
    grouped = _series_points(rows, spec)
    bounds = _bound_curves(rows, spec)

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    known = [k for k in _SERIES_STYLE if k in grouped]
    extra = sorted(k for k in grouped if k not in _SERIES_STYLE)
    for pos, key in enumerate(known + extra):
        if key in _SERIES_STYLE:
            color, marker = _SERIES_STYLE[key]
        else:
            color = _FALLBACK_COLORS[pos % len(_FALLBACK_COLORS)]
            marker = "d"
        pts = grouped[key]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, color=color, marker=marker, label=key)
        if spec.bands:
            lo = [p[1] - p[2] for p in pts]
            hi = [p[1] + p[2] for p in pts]
            ax.fill_between(xs, lo, hi, color=color, alpha=0.15, linewidth=0)
    bound_labels = {"r_per": "perfect CSI", "r_low": "lower bound"}
    for col, pts in bounds.items():
        ax.plot([p[0] for p in pts], [p[1] for p in pts], color="black",
                linestyle="--" if col == "r_per" else ":",
                linewidth=1.0, label=bound_labels[col])
    ax.set_xlabel(_AXIS_LABELS.get(spec.axis, spec.axis))
    ax.set_ylabel("sum throughput (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    # Empty metadata keeps the bytes independent of library version and
    # wall-clock time, so identical CSVs give identical images.
    fig.savefig(spec.out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return spec.out_path
