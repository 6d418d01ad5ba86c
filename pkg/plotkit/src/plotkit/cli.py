"""Command-line renderer: one figure per invocation.

    plotkit eps-family "out/eps*_t1.5.csv" "out/eps*_t2.25.csv" -o fig2.png
    plotkit comparison-grid "out/nonlocal-u1_*.csv" "out/local-u1_*.csv" \
            "out/local-u2_*.csv" -o fig3.png
    plotkit surface-pair out/ -o fig4.png
    plotkit four-panel out/series.csv -o fig5.png

Exit codes: 0 success, 2 bad arguments or input contract violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .reader import PlotkitError
from .render import LAYOUTS, FigureRecipe, render

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figure layouts from obstaflow CSV bundles.",
    )
    p.add_argument("layout", choices=LAYOUTS)
    p.add_argument("inputs", nargs="+",
                   help="layout-dependent input globs/paths (quote globs)")
    p.add_argument("-o", "--out", default="figure.png", help="output image path")
    p.add_argument("--xlim", type=float, nargs=2, default=None)
    p.add_argument("--ylim", type=float, nargs=2, default=None)
    p.add_argument("--no-obstacle", action="store_true",
                   help="suppress the obstacle overlay on profile plots")
    p.add_argument("--labels", nargs="+", default=None,
                   help="panel/row titles (defaults to the input names)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    recipe = None
    try:
        recipe = FigureRecipe(
            layout=args.layout,
            inputs=tuple(args.inputs),
            out=args.out,
            xlim=None if args.xlim is None else tuple(args.xlim),
            ylim=None if args.ylim is None else tuple(args.ylim),
            obstacle_overlay=not args.no_obstacle,
            labels=tuple(args.labels) if args.labels else (),
        )
        out = render(recipe)
    except PlotkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
