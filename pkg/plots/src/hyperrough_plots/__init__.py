"""Figure rendering for the simulation toolkit's delimited outputs."""

from .figures import (build_marginal_figure, build_trajectory_figure, render,
                      render_marginals, render_trajectories)
from .tables import FigureSpec, SchemaError, load_figure_specs, read_table

__all__ = [
    "FigureSpec",
    "SchemaError",
    "load_figure_specs",
    "read_table",
    "build_trajectory_figure",
    "build_marginal_figure",
    "render",
    "render_trajectories",
    "render_marginals",
]

__version__ = "0.1.0"
