"""Figure layouts rendered from CSV bundles.

Layouts:
  eps-family      two panels (one per snapshot time), one curve per epsilon
                  member plus the obstacle overlay
  comparison-grid one row per model, one column per snapshot time
  surface-pair    two heatmaps (q and V) on a shared color scale [0, 1.1]
  four-panel      2x2 grid of diagnostics time series

Rendering is read-only and deterministic: fixed figure geometry and dpi per
layout, colors from a fixed cycle, inputs sorted by filename.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .reader import PlotkitError, expand_glob, read_matrix, read_series, read_snapshot

__all__ = ["FigureRecipe", "render", "LAYOUTS"]

LAYOUTS = ("eps-family", "comparison-grid", "surface-pair", "four-panel")

_DPI = 100
_CYCLE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
          "#8c564b", "#e377c2", "#7f7f7f")
_OBSTACLE_STYLE = dict(color="black", linewidth=1.6, linestyle="--")
_SURFACE_VRANGE = (0.0, 1.1)


@dataclass(frozen=True)
class FigureRecipe:
    """One figure: a layout, its input globs and the axis conventions.

    ``inputs`` is layout-dependent:
      eps-family      one glob per panel; each matches the family snapshots
      comparison-grid one glob per row; each matches that model's snapshots
      surface-pair    a single directory containing osl_times/osl_x/osl_q/
                      osl_v.csv, or the four file paths in that order
      four-panel      a single series CSV path
    """

    layout: str
    inputs: Tuple[str, ...]
    out: str = "figure.png"
    xlim: Optional[Tuple[float, float]] = None
    ylim: Optional[Tuple[float, float]] = None
    obstacle_overlay: bool = True
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise PlotkitError(
                f"expected layout in {list(LAYOUTS)}, found {self.layout!r}"
            )
        if not self.inputs:
            raise PlotkitError("expected at least one input glob, found none")
        object.__setattr__(self, "inputs", tuple(str(g) for g in self.inputs))


def _label_for(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _apply_limits(ax, recipe: FigureRecipe) -> None:
    if recipe.xlim is not None:
        ax.set_xlim(*recipe.xlim)
    if recipe.ylim is not None:
        ax.set_ylim(*recipe.ylim)


def _draw_profiles(ax, paths: Sequence[str], recipe: FigureRecipe, title: str) -> None:
    for k, path in enumerate(paths):
        cols = read_snapshot(path)
        ax.plot(cols["x"], cols["q"], color=_CYCLE[k % len(_CYCLE)],
                linewidth=1.2, label=_label_for(path))
    if recipe.obstacle_overlay:
        first = read_snapshot(paths[0])
        ax.plot(first["x"], first["o"], **_OBSTACLE_STYLE, label="obstacle")
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("x", fontsize=8)
    ax.tick_params(labelsize=7)
    _apply_limits(ax, recipe)


def _render_eps_family(recipe: FigureRecipe):
    panels = [expand_glob(g) for g in recipe.inputs]
    fig, axes = plt.subplots(1, len(panels),
                             figsize=(4.2 * len(panels), 3.4), dpi=_DPI)
    axes = np.atleast_1d(axes)
    titles = recipe.labels or tuple(g for g in recipe.inputs)
    for ax, paths, title in zip(axes, panels, titles):
        _draw_profiles(ax, paths, recipe, str(title))
    axes[0].legend(fontsize=6, loc="upper right")
    fig.tight_layout()
    return fig


def _render_comparison_grid(recipe: FigureRecipe):
    rows = [expand_glob(g) for g in recipe.inputs]
    ncols = max(len(r) for r in rows)
    fig, axes = plt.subplots(len(rows), ncols,
                             figsize=(2.6 * ncols, 2.2 * len(rows)),
                             dpi=_DPI, squeeze=False)
    row_labels = recipe.labels or tuple(g for g in recipe.inputs)
    for i, paths in enumerate(rows):
        for j in range(ncols):
            ax = axes[i][j]
            if j >= len(paths):
                ax.axis("off")
                continue
            _draw_profiles(ax, [paths[j]], recipe, _label_for(paths[j]))
        axes[i][0].set_ylabel(str(row_labels[i]), fontsize=8)
    fig.tight_layout()
    return fig


def _surface_files(recipe: FigureRecipe) -> Tuple[str, str, str, str]:
    if len(recipe.inputs) == 1 and os.path.isdir(recipe.inputs[0]):
        d = recipe.inputs[0]
        return tuple(os.path.join(d, n + ".csv")
                     for n in ("osl_times", "osl_x", "osl_q", "osl_v"))
    if len(recipe.inputs) == 4:
        return recipe.inputs
    raise PlotkitError(
        "surface-pair expects one directory or four files "
        f"(times, x, q, v), found {len(recipe.inputs)} inputs"
    )


def _render_surface_pair(recipe: FigureRecipe):
    t_path, x_path, q_path, v_path = _surface_files(recipe)
    times = read_matrix(t_path).ravel()
    x = read_matrix(x_path).ravel()
    q = read_matrix(q_path)
    v = read_matrix(v_path)
    for name, m in (("q", q), ("V", v)):
        if m.shape != (len(times), len(x)):
            raise PlotkitError(
                f"surface {name}: expected shape {(len(times), len(x))} "
                f"(n_times, n_cells), found {m.shape}"
            )
    vmin, vmax = _SURFACE_VRANGE
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6), dpi=_DPI)
    for ax, (name, m) in zip(axes, (("q", q), ("V", v))):
        im = ax.pcolormesh(x, times, m, vmin=vmin, vmax=vmax,
                           shading="nearest", rasterized=True)
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("x", fontsize=8)
        ax.set_ylabel("t", fontsize=8)
        ax.tick_params(labelsize=7)
    fig.colorbar(im, ax=axes, fraction=0.04)
    return fig


_FOUR_PANEL_FIELDS = ("min_clearance", "tv", "osl_lower_q", "osl_upper_v")


def _render_four_panel(recipe: FigureRecipe):
    if len(recipe.inputs) != 1:
        raise PlotkitError(
            f"four-panel expects a single series CSV, found {len(recipe.inputs)} inputs"
        )
    series = read_series(recipe.inputs[0])
    fig, axes = plt.subplots(2, 2, figsize=(7.2, 5.2), dpi=_DPI)
    for ax, name in zip(axes.ravel(), _FOUR_PANEL_FIELDS):
        ax.plot(series["times"], series[name], color=_CYCLE[0], linewidth=1.0)
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("t", fontsize=8)
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "eps-family": _render_eps_family,
    "comparison-grid": _render_comparison_grid,
    "surface-pair": _render_surface_pair,
    "four-panel": _render_four_panel,
}


def render(recipe: FigureRecipe) -> str:
    """Draw the recipe and write the image file; returns the output path."""
    fig = _RENDERERS[recipe.layout](recipe)
    try:
        fig.savefig(recipe.out, dpi=_DPI)
    finally:
        plt.close(fig)
    return recipe.out
