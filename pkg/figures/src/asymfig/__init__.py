"""Plotting scripts for the asymren CLI's CSV/JSON output files.

The renderers are pure functions of their input files: they parse the
documented CSV schemas, never recompute any dynamics, and plot
pre-computed log columns for quantities whose raw values underflow
double precision.
"""

from .render import FigureSpec, InputError, render, KINDS

__all__ = ["FigureSpec", "InputError", "render", "KINDS"]

__version__ = "0.1.0"
