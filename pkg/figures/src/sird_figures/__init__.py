"""Static comparison plots for ensemble summary CSV files."""

from .render import FigureInputError, FigureSpec, load_series, load_summary, render

__version__ = "0.1.0"
