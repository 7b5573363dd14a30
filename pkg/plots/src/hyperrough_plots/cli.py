"""Command line: render figure specs to PNG files.

    render --spec FILE --out DIR

The spec file holds one JSON object (or a list) with kind, inputs,
output, dpi. Relative input paths resolve against the spec file;
relative output paths resolve against --out. Exit code 0 on success,
1 on any spec, schema, or I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .figures import render
from .tables import SchemaError, load_figure_specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render simulation-output figures")
    parser.add_argument("--spec", required=True, metavar="FILE",
                        help="figure spec JSON")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="directory for relative output paths")
    args = parser.parse_args(argv)
    try:
        for spec in load_figure_specs(args.spec):
            output = (spec.output if os.path.isabs(spec.output)
                      else os.path.join(args.out, spec.output))
            os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
            written = render(dataclasses.replace(spec, output=output))
            print(written)
        return 0
    except (SchemaError, ValueError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
