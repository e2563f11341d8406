"""Figure kinds and their matplotlib renderers.

Five kinds are supported:

  trace          one axes, chosen columns against x from one or more CSVs
  panel          one subplot per column (the classic 6-scalar layout)
  sweep-overlay  the same column from several CSVs overlaid, legend by file
  eigen-trace    the re0..re5 eigenvalue real parts against x
  kplus-surface  color maps of grid CSV columns over the (eps, deps) plane

Sign-aware log axes use symlog with a fixed linear threshold, since the
source data mixes ln(positive) and ln|negative| quantities.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

from .errors import SpecError

FIGURE_KINDS = ("trace", "panel", "sweep-overlay", "eigen-trace",
                "kplus-surface")
AXIS_SCALES = ("linear", "log", "symlog")
SYMLOG_LINTHRESH = 1e-3

EIGEN_COLUMNS = tuple(f"re{i}" for i in range(6))


@dataclass(frozen=True)
class FigureSpec:
    """One figure: what to read, what to draw, where to write it."""

    kind: str
    inputs: tuple
    columns: tuple
    output: str
    x: str = "tau"
    scales: dict = field(default_factory=dict)
    title: str | None = None

    @classmethod
    def from_mapping(cls, m: dict) -> "FigureSpec":
        if not isinstance(m, dict):
            raise SpecError("figure spec must be a mapping")
        kind = m.get("kind")
        if kind not in FIGURE_KINDS:
            raise SpecError(f"unknown figure kind {kind!r}; "
                            f"expected one of {', '.join(FIGURE_KINDS)}")
        inputs = m.get("inputs")
        if not isinstance(inputs, list) or not inputs:
            raise SpecError("figure spec needs a non-empty 'inputs' list")
        columns = m.get("columns")
        if not isinstance(columns, list) or not columns:
            raise SpecError("figure spec needs a non-empty 'columns' list")
        output = m.get("output")
        if not output:
            raise SpecError("figure spec needs an 'output' image path")
        scales = m.get("scales", {})
        if not isinstance(scales, dict):
            raise SpecError("'scales' must map axis names to scale names")
        for axis, scale in scales.items():
            if axis not in ("x", "y", "color"):
                raise SpecError(f"unknown scale axis {axis!r}")
            if scale not in AXIS_SCALES:
                raise SpecError(f"unknown scale {scale!r}; "
                                f"expected one of {', '.join(AXIS_SCALES)}")
        known = {"name", "kind", "inputs", "columns", "output", "x",
                 "scales", "title"}
        unknown = set(m) - known
        if unknown:
            raise SpecError(f"unknown figure spec keys: {sorted(unknown)}")
        return cls(kind=kind, inputs=tuple(inputs), columns=tuple(columns),
                   output=str(output), x=str(m.get("x", "tau")),
                   scales=dict(scales), title=m.get("title"))


def load_table(path) -> dict:
    """Read a CSV into {column: float ndarray}, preserving column order."""
    path = Path(path)
    if not path.exists():
        raise SpecError(f"input file not found: {path}")
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if not reader.fieldnames:
            raise SpecError(f"input file has no header row: {path}")
        cols = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in cols:
                cols[name].append(float(row[name]))
    return {name: np.asarray(vals) for name, vals in cols.items()}


def require_columns(table: dict, names, path) -> None:
    missing = [n for n in names if n not in table]
    if missing:
        raise SpecError(f"missing columns {missing} in {path}; "
                        f"present: {sorted(table)}")


def _apply_scale(ax, axis: str, scale: str) -> None:
    setter = ax.set_xscale if axis == "x" else ax.set_yscale
    if scale == "symlog":
        setter("symlog", linthresh=SYMLOG_LINTHRESH)
    else:
        setter(scale)


def _apply_scales(ax, spec: FigureSpec) -> None:
    for axis in ("x", "y"):
        if axis in spec.scales:
            _apply_scale(ax, axis, spec.scales[axis])


def grid_pivot(table: dict, xcol: str, ycol: str, vcol: str):
    """Reshape grid-CSV columns into (x_axis, y_axis, values[y, x])."""
    xs = np.unique(table[xcol])
    ys = np.unique(table[ycol])
    if xs.size * ys.size != table[vcol].size:
        raise SpecError(f"column {vcol!r} does not fill a "
                        f"{xs.size} x {ys.size} grid")
    Z = np.full((ys.size, xs.size), math.nan)
    xi = np.searchsorted(xs, table[xcol])
    yi = np.searchsorted(ys, table[ycol])
    Z[yi, xi] = table[vcol]
    if np.isnan(Z).any():
        raise SpecError(f"grid for {vcol!r} has holes: "
                        "duplicate or missing (x, y) points")
    return xs, ys, Z


def _finish(fig, spec: FigureSpec) -> Path:
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if spec.title:
        fig.suptitle(spec.title)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def _render_trace(spec: FigureSpec) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in spec.inputs:
        table = load_table(path)
        require_columns(table, (spec.x, *spec.columns), path)
        stem = Path(path).stem
        for col in spec.columns:
            label = col if len(spec.inputs) == 1 else f"{stem}:{col}"
            ax.plot(table[spec.x], table[col], label=label)
    _apply_scales(ax, spec)
    ax.set_xlabel(spec.x)
    ax.legend()
    return _finish(fig, spec)


def _render_panel(spec: FigureSpec) -> Path:
    if len(spec.inputs) != 1:
        raise SpecError("panel figures take exactly one input CSV")
    table = load_table(spec.inputs[0])
    require_columns(table, (spec.x, *spec.columns), spec.inputs[0])
    n = len(spec.columns)
    ncols = 3 if n > 4 else 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 2.8 * nrows),
                             squeeze=False, sharex=True)
    for i, col in enumerate(spec.columns):
        ax = axes[i // ncols][i % ncols]
        ax.plot(table[spec.x], table[col])
        ax.set_title(col)
        _apply_scales(ax, spec)
    for i in range(n, nrows * ncols):
        axes[i // ncols][i % ncols].axis("off")
    for ax in axes[-1]:
        ax.set_xlabel(spec.x)
    fig.tight_layout()
    return _finish(fig, spec)


def _render_sweep_overlay(spec: FigureSpec) -> Path:
    if len(spec.columns) != 1:
        raise SpecError("sweep-overlay takes exactly one column")
    col = spec.columns[0]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in spec.inputs:
        table = load_table(path)
        require_columns(table, (spec.x, col), path)
        ax.plot(table[spec.x], table[col], label=Path(path).stem)
    _apply_scales(ax, spec)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(col)
    ax.legend()
    return _finish(fig, spec)


def _render_eigen_trace(spec: FigureSpec) -> Path:
    if len(spec.inputs) != 1:
        raise SpecError("eigen-trace takes exactly one input CSV")
    columns = spec.columns if tuple(spec.columns) != ("*",) else EIGEN_COLUMNS
    table = load_table(spec.inputs[0])
    require_columns(table, (spec.x, *columns), spec.inputs[0])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for col in columns:
        ax.plot(table[spec.x], table[col], label=col)
    ax.axhline(0.0, color="black", linewidth=0.8)
    _apply_scales(ax, spec)
    ax.set_xlabel(spec.x)
    ax.set_ylabel("eigenvalue real part")
    ax.legend(ncol=3)
    return _finish(fig, spec)


def _render_kplus_surface(spec: FigureSpec) -> Path:
    if len(spec.inputs) != 1:
        raise SpecError("kplus-surface takes exactly one input CSV")
    table = load_table(spec.inputs[0])
    xcol = spec.x if spec.x != "tau" else "eps"
    ycol = "deps"
    require_columns(table, (xcol, ycol, *spec.columns), spec.inputs[0])
    n = len(spec.columns)
    fig, axes = plt.subplots(1, n, figsize=(4.5 * n, 4), squeeze=False)
    for ax, col in zip(axes[0], spec.columns):
        xs, ys, Z = grid_pivot(table, xcol, ycol, col)
        masked = np.ma.masked_less_equal(Z, 0.0)
        cmap = plt.get_cmap("viridis").copy()
        cmap.set_bad("white")  # exact zeros render blank, not as fake color
        if masked.count():
            norm = LogNorm(vmin=float(masked.min()), vmax=float(masked.max()))
            mesh = ax.pcolormesh(xs, ys, masked, cmap=cmap, norm=norm,
                                 shading="nearest")
            fig.colorbar(mesh, ax=ax)
        else:
            ax.pcolormesh(xs, ys, masked, cmap=cmap, shading="nearest")
        ax.set_title(col)
        ax.set_xlabel(xcol)
        ax.set_ylabel(ycol)
    fig.tight_layout()
    return _finish(fig, spec)


_RENDERERS = {
    "trace": _render_trace,
    "panel": _render_panel,
    "sweep-overlay": _render_sweep_overlay,
    "eigen-trace": _render_eigen_trace,
    "kplus-surface": _render_kplus_surface,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure spec; returns the written image path."""
    return _RENDERERS[spec.kind](spec)
