"""Command line front end: render one figure from one or more report CSVs."""

from __future__ import annotations

import argparse
import sys

from .errors import PlotError
from .figures import FORMATS, KINDS, FigureSpec, render, sidecar_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="di-plots",
        description="draw a figure from identification-code simulation CSV reports",
    )
    parser.add_argument("figure_kind", choices=KINDS, help="which figure layout to draw")
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV file; repeat the flag to concatenate several",
    )
    parser.add_argument("--out", required=True, metavar="IMAGE", help="output image path")
    parser.add_argument(
        "--fmt",
        choices=FORMATS,
        default=None,
        help="image format (default: taken from the --out suffix)",
    )
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_paths(args.figure_kind, args.inputs, args.out, args.fmt)
        out = render(spec)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except PlotError as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"input error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {out} (data table {sidecar_path(out)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
