"""Figure renderer for offshell run CSVs.

Reads the CSVs written by the offshell CLI and turns them into static
figures.  All numbers plotted here originate in those files; this
package performs no integration or right-hand-side evaluation.
"""

from .errors import SpecError
from .figures import FIGURE_KINDS, FigureSpec, grid_pivot, load_table, render

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "SpecError",
    "grid_pivot",
    "load_table",
    "render",
    "__version__",
]
