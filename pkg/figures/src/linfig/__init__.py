"""CSV-to-figure rendering for the linearizer experiments."""

from .render import FigureError, build_figure, load_spec, main, render

__all__ = ["FigureError", "build_figure", "load_spec", "main", "render"]
