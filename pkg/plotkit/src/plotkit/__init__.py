"""Figure renderer for obstaflow CSV result bundles.

Reads the solver CLI's snapshot/series/matrix CSV contract and renders the
standard figure layouts (epsilon family, model comparison grid, surface
pair, diagnostics four-panel) to image files.
"""

from .reader import (
    PlotkitError,
    SERIES_COLUMNS,
    SNAPSHOT_COLUMNS,
    expand_glob,
    read_matrix,
    read_series,
    read_snapshot,
)
from .render import LAYOUTS, FigureRecipe, render

__version__ = "1.0.0"

__all__ = [
    "PlotkitError",
    "SNAPSHOT_COLUMNS",
    "SERIES_COLUMNS",
    "expand_glob",
    "read_snapshot",
    "read_series",
    "read_matrix",
    "LAYOUTS",
    "FigureRecipe",
    "render",
    "__version__",
]
