"""Panel builders and renderers.

Two layouts: a trajectory panel (X, M, residual stacked, one curve
per Hurst value plus the dotted limit path) and a marginal panel
(terminal densities for both components over their reference curves,
plus the characteristic-function comparison). Builders return live
figures for structural inspection; renderers save PNG and close.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .tables import FigureSpec, read_table

__all__ = [
    "build_trajectory_figure",
    "build_marginal_figure",
    "render_trajectories",
    "render_marginals",
    "render",
]

_TRAJ_COLS = ("t", "X", "M", "residual")
_DENS_COLS = ("center", "density", "reference")
_CF_COLS = ("u", "v", "emp_re", "emp_im", "lim_re", "lim_im")


def _tag(path: str, prefix: str) -> str:
    name = os.path.basename(path)
    if not (name.startswith(prefix) and name.endswith(".csv")):
        raise ValueError(f"cannot read a curve tag from {name!r} "
                         f"(expected {prefix}<tag>.csv)")
    return name[len(prefix):-4]


def _label(tag: str) -> str:
    return "limit" if tag == "limit" else f"H = {tag[1:]}"


def build_trajectory_figure(spec: FigureSpec):
    """Build the stacked (X, M, residual) panel from trajectory CSVs.

    Returns the figure. One solid curve per finite-H input, the limit
    path dotted black, legend carrying every input. The residual row
    is the CSV residual column verbatim.
    """
    finite, limit = [], None
    for path in spec.inputs:
        tag = _tag(path, "trajectory_")
        table = read_table(path, "trajectory", _TRAJ_COLS)
        if tag == "limit":
            limit = table
        else:
            finite.append((_label(tag), table))
    if not finite:
        raise ValueError("trajectory panel needs at least one finite-H input")
    if limit is None:
        raise ValueError("trajectory panel needs the limit input")

    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.0), sharex=True)
    for row, col in zip(axes, ("X", "M", "residual")):
        for label, table in finite:
            row.plot(table["t"], table[col], lw=1.0, label=label)
        row.plot(limit["t"], limit[col], "k:", lw=1.4, label="limit")
        row.set_ylabel(col)
    axes[-1].set_xlabel("t")
    axes[0].legend(loc="upper left", fontsize="small")
    fig.align_ylabels(axes)
    return fig


def build_marginal_figure(spec: FigureSpec):
    """Build the (density-X, density-M, CF) panel.

    Density rows draw each input histogram over the reference curve
    shipped in the same file; the CF row draws the empirical real and
    imaginary series per u value against the closed-form limit.
    """
    dens = {"X": [], "M": []}
    cf = None
    for path in spec.inputs:
        name = os.path.basename(path)
        if name.startswith("density_X_"):
            dens["X"].append((_label(_tag(path, "density_X_")),
                              read_table(path, "density", _DENS_COLS)))
        elif name.startswith("density_M_"):
            dens["M"].append((_label(_tag(path, "density_M_")),
                              read_table(path, "density", _DENS_COLS)))
        else:
            cf = read_table(path, "cf", _CF_COLS)
    if not dens["X"] or not dens["M"]:
        raise ValueError("marginal panel needs density inputs for X and M")
    if cf is None:
        raise ValueError("marginal panel needs the CF grid input")

    fig, axes = plt.subplots(3, 1, figsize=(7.0, 9.0))
    for row, comp in zip(axes[:2], ("X", "M")):
        first = True
        for label, table in dens[comp]:
            row.plot(table["center"], table["density"], lw=1.0, label=label)
            row.plot(table["center"], table["reference"], "k-", lw=1.0,
                     label="reference" if first else None)
            first = False
        row.set_xlabel(f"{comp}_T")
        row.set_ylabel("density")
        row.legend(fontsize="small")

    row = axes[2]
    first = True
    for u in dict.fromkeys(cf["u"]):  # unique values, input order
        sel = cf["u"] == u
        v = cf["v"][sel]
        lines = row.plot(v, cf["emp_re"][sel], lw=1.0, label=f"u={u:g} Re")
        row.plot(v, cf["emp_im"][sel], "--", lw=1.0,
                 color=lines[0].get_color(), label=f"u={u:g} Im")
        row.plot(v, cf["lim_re"][sel], "k-", lw=0.7,
                 label="limit" if first else None)
        row.plot(v, cf["lim_im"][sel], "k--", lw=0.7)
        first = False
    row.set_xlabel("v")
    row.set_ylabel("CF")
    row.legend(fontsize="x-small", ncols=2)
    fig.align_ylabels(axes)
    return fig


def _save(fig, spec: FigureSpec) -> str:
    try:
        fig.savefig(spec.output, dpi=spec.dpi, format="png")
    finally:
        plt.close(fig)
    return spec.output


def render_trajectories(spec: FigureSpec) -> str:
    """Render the trajectory panel; returns the written path."""
    return _save(build_trajectory_figure(spec), spec)


def render_marginals(spec: FigureSpec) -> str:
    """Render the marginal panel; returns the written path."""
    return _save(build_marginal_figure(spec), spec)


def render(spec: FigureSpec) -> str:
    """Render one FigureSpec of either kind; returns the written path."""
    if spec.kind == "trajectories":
        return render_trajectories(spec)
    return render_marginals(spec)
