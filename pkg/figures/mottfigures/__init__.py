"""Figure regeneration from photonmott CSV artifacts.

Plots are pure functions of CSV content plus a FigureSpec; no physics is
recomputed here.  Rendering is pinned (Agg backend, fixed dpi) so identical
inputs produce byte-identical images.
"""

from .figspec import CurveSpec, FigureSpec, MissingColumnError, load_columns, render
from .mott import plot_mott
from .transition import plot_transition

__all__ = [
    "CurveSpec",
    "FigureSpec",
    "MissingColumnError",
    "load_columns",
    "plot_mott",
    "plot_transition",
    "render",
]
