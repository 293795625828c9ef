"""Figure rendering for sdnlw study output.

Consumes only the manifest JSON and tidy CSV files written by
``sdnlw plotdata``; never recomputes any solver quantity.
"""

from .manifest import FigureManifest, ManifestError, load_manifest
from .render import RenderError, render_all, render_figure, structure_hash

__all__ = [
    "FigureManifest",
    "ManifestError",
    "load_manifest",
    "RenderError",
    "render_all",
    "render_figure",
    "structure_hash",
]
