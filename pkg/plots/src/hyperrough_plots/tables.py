"""Figure specifications and schema-checked readers for the CSV outputs.

This package draws precomputed curves; every number plotted comes out
of a delimited file written by the simulation toolkit, identified by
the schema tag on the file's first line.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

__all__ = ["SchemaError", "FigureSpec", "load_figure_specs", "read_table"]

_KINDS = ("trajectories", "marginals")


class SchemaError(ValueError):
    """An input file does not match the expected tabular schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: inputs, panel kind, output path, resolution.

    Attributes
    ----------
    kind : str
        Panel layout, "trajectories" (rows X, M, residual) or
        "marginals" (rows density-X, density-M, CF).
    inputs : tuple of str
        CSV files feeding the panels.
    output : str
        Image path, PNG.
    dpi : int
    """

    kind: str
    inputs: tuple
    output: str
    dpi: int = 120

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("inputs must not be empty")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        for p in self.inputs:
            if not os.path.isfile(p):
                raise ValueError(f"input file not found: {p}")
        if not str(self.output).endswith(".png"):
            raise ValueError(f"output must be a .png path, got {self.output!r}")
        if not 20 <= int(self.dpi) <= 1000:
            raise ValueError(f"dpi must be in [20, 1000], got {self.dpi}")


def load_figure_specs(path: str) -> list:
    """Parse a figure-spec JSON file into FigureSpec objects.

    The file holds one spec object or a list of them, with keys kind,
    inputs, output, and optional dpi. Input paths are resolved
    relative to the spec file's directory; the output path is left
    untouched for the caller to resolve.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read spec file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"spec file {path} is not valid JSON: {exc}")
    entries = raw if isinstance(raw, list) else [raw]
    base = os.path.dirname(os.path.abspath(path))
    specs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ValueError(f"spec entry {i} must be an object")
        unknown = set(entry) - {"kind", "inputs", "output", "dpi"}
        if unknown:
            raise ValueError(f"spec entry {i}: unknown keys {sorted(unknown)}")
        missing = {"kind", "inputs", "output"} - set(entry)
        if missing:
            raise ValueError(f"spec entry {i}: missing keys {sorted(missing)}")
        inputs = entry["inputs"]
        if not isinstance(inputs, list):
            raise ValueError(f"spec entry {i}: inputs must be a list")
        resolved = [p if os.path.isabs(p) else os.path.join(base, p)
                    for p in inputs]
        specs.append(FigureSpec(kind=entry["kind"], inputs=tuple(resolved),
                                output=entry["output"],
                                dpi=int(entry.get("dpi", 120))))
    return specs


def read_table(path: str, schema: str, required: tuple) -> dict:
    """Read one schema-tagged CSV into a column dict of float arrays.

    The first line must carry the matching schema tag, the second the
    column names. A missing required column raises SchemaError naming
    it. Extra columns are kept.
    """
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().strip()
        names = fh.readline().strip().split(",")
    tag = f"# schema=hyperrough.{schema}/"
    if not head.startswith(tag):
        raise SchemaError(f"{path}: expected a {tag}* header, got {head!r}")
    for col in required:
        if col not in names:
            raise SchemaError(f"{path}: missing column {col!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    if data.shape[1] != len(names):
        raise SchemaError(f"{path}: {len(names)} columns declared, "
                          f"{data.shape[1]} found")
    return {name: data[:, i] for i, name in enumerate(names)}
