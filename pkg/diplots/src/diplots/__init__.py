"""Figure rendering for identification-code simulation CSV reports.

Consumes the simulator's pinned CSV layouts (per-pair error reports, bound
curves, exponent sweeps) and renders them as SVG or PNG figures, each with
a sidecar data table holding exactly the numbers that were drawn.
"""

__version__ = "0.1.0"

from .errors import EmptyInput, PlotError, SchemaError
from .figures import FORMATS, KINDS, REQUIRED, SIDECAR_COLUMNS, FigureSpec, render, sidecar_path

__all__ = [
    "EmptyInput",
    "FORMATS",
    "FigureSpec",
    "KINDS",
    "PlotError",
    "REQUIRED",
    "SIDECAR_COLUMNS",
    "SchemaError",
    "render",
    "sidecar_path",
    "__version__",
]
