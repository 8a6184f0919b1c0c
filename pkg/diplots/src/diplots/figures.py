"""Figure construction for the three simulator CSV layouts.

Rendering is read-only: input CSVs are parsed, never rewritten.  Each
figure also writes a sidecar ``<output stem>_data.csv`` holding exactly
the numbers that were drawn, so a plot can be audited or re-styled later
without going back to the original report.  Input cells are copied into
the sidecar verbatim and derived columns are formatted with 17 significant
digits, which keeps repeated renders byte-identical.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import csv

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "diplots"

import matplotlib.pyplot as plt

from .tables import Row, cell_float, read_rows

KINDS = ("error_vs_threshold", "rate_vs_n", "rr_tradeoff")
FORMATS = ("svg", "png")

REQUIRED = {
    "error_vs_threshold": ("threshold", "pair_kind", "estimate", "ci_low", "ci_high", "analytic"),
    "rate_vs_n": ("name", "n", "L", "value", "label"),
    "rr_tradeoff": ("E", "rr_lower", "rr_upper", "empirical_rate"),
}

SIDECAR_COLUMNS = {
    "error_vs_threshold": ("threshold", "pair_kind", "estimate", "ci_low", "ci_high", "analytic"),
    "rate_vs_n": ("name", "L", "n", "value", "label"),
    "rr_tradeoff": ("E", "rr_lower", "rr_upper", "band_width", "empirical_rate"),
}


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: which layout, from which files, into which image."""

    kind: str
    inputs: tuple[Path, ...]
    output: Path
    image_format: str = "svg"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.image_format not in FORMATS:
            raise ValueError(
                f"unsupported image format {self.image_format!r}; known: {', '.join(FORMATS)}"
            )
        if not self.inputs:
            raise ValueError("at least one input CSV is required")

    @classmethod
    def from_paths(
        cls,
        kind: str,
        inputs: Iterable[str | Path],
        output: str | Path,
        image_format: str | None = None,
    ) -> "FigureSpec":
        """Build a spec, inferring the image format from the output suffix."""
        out = Path(output)
        if image_format is None:
            image_format = out.suffix.lstrip(".").lower()
        return cls(kind, tuple(Path(p) for p in inputs), out, image_format)


def sidecar_path(output: str | Path) -> Path:
    """Where the data table for a given image lands."""
    out = Path(output)
    return out.with_name(f"{out.stem}_data.csv")


def render(spec: FigureSpec) -> Path:
    """Draw the figure and its sidecar data table; returns the image path."""
    rows = read_rows(spec.inputs, REQUIRED[spec.kind])
    fig, table = _BUILDERS[spec.kind](rows)
    try:
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if spec.image_format == "svg" else None
        fig.savefig(spec.output, format=spec.image_format, metadata=metadata)
    finally:
        plt.close(fig)
    _write_sidecar(sidecar_path(spec.output), SIDECAR_COLUMNS[spec.kind], table)
    return spec.output


def _error_vs_threshold(rows: list[Row]) -> tuple[plt.Figure, list[dict]]:
    """Per-pair error estimates against the decision threshold.

    Same-word rows (missed identification) and differing-pair rows (false
    identification) form separate series.  Rows that were simulated get a
    point with Wilson-interval whiskers; the analytic column is overlaid
    as a line per series, and analytic-only rows contribute to the line
    alone.
    """
    series: dict[str, list[tuple]] = {"miss": [], "false": []}
    table = []
    for row in rows:
        which = "miss" if row["pair_kind"].startswith("same_word") else "false"
        series[which].append(
            (
                float(row["threshold"]),
                cell_float(row, "estimate"),
                cell_float(row, "ci_low"),
                cell_float(row, "ci_high"),
                float(row["analytic"]),
            )
        )
        table.append({name: row[name] for name in SIDECAR_COLUMNS["error_vs_threshold"]})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    styles = {
        "miss": ("tab:blue", "o", "missed identification"),
        "false": ("tab:red", "s", "false identification"),
    }
    for which in ("miss", "false"):
        points = sorted(series[which], key=lambda p: p[0])
        if not points:
            continue
        color, marker, label = styles[which]
        ax.plot(
            [p[0] for p in points],
            [p[4] for p in points],
            color=color,
            linestyle="--",
            linewidth=1.0,
            label=f"{label} (analytic)",
        )
        drawn = [p for p in points if p[1] is not None]
        if drawn:
            ax.errorbar(
                [p[0] for p in drawn],
                [p[1] for p in drawn],
                yerr=(
                    [p[1] - p[2] for p in drawn],
                    [p[3] - p[1] for p in drawn],
                ),
                color=color,
                marker=marker,
                linestyle="none",
                capsize=3.0,
                label=f"{label} (measured)",
            )
    ax.set_xlabel("decision threshold")
    ax.set_ylabel("error probability")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig, table


def _rate_vs_n(rows: list[Row]) -> tuple[plt.Figure, list[dict]]:
    """Bound values against block length, one line per (name, depth).

    Rows without a block length are asymptotic references and are drawn
    as horizontal dotted lines instead of curve points.
    """
    curves: dict[tuple[str, str], list[tuple[float, float]]] = {}
    references = []
    table = []
    for row in rows:
        value = float(row["value"])
        n = cell_float(row, "n")
        if n is None:
            references.append((row["name"], value))
        else:
            curves.setdefault((row["name"], row["L"]), []).append((n, value))
        table.append({name: row[name] for name in SIDECAR_COLUMNS["rate_vs_n"]})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for (name, depth), points in curves.items():
        points.sort(key=lambda p: p[0])
        label = name if depth == "" else f"{name} (L={depth})"
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=label)
    for name, value in references:
        ax.axhline(value, linestyle=":", color="gray", linewidth=1.0, label=name)
    if curves:
        ax.set_xscale("log", base=2)
    ax.set_xlabel("block length n")
    ax.set_ylabel("rate (bits)")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig, table


def _rr_tradeoff(rows: list[Row]) -> tuple[plt.Figure, list[dict]]:
    """Achievable-rate band over the reliability exponent.

    The area between the lower and upper rate bounds is shaded and the
    measured rates are drawn on top as points.  The sidecar carries the
    band width per grid point so its constancy can be checked directly.
    """
    points = []
    for row in rows:
        points.append(
            (
                float(row["E"]),
                float(row["rr_lower"]),
                float(row["rr_upper"]),
                cell_float(row, "empirical_rate"),
                row,
            )
        )
    points.sort(key=lambda p: p[0])
    table = []
    for exponent, lower, upper, rate, row in points:
        entry = {name: row[name] for name in ("E", "rr_lower", "rr_upper", "empirical_rate")}
        entry["band_width"] = format(upper - lower, ".17g")
        table.append(entry)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    grid = [p[0] for p in points]
    ax.fill_between(
        grid,
        [p[1] for p in points],
        [p[2] for p in points],
        alpha=0.25,
        color="tab:blue",
        label="achievable band",
    )
    ax.plot(grid, [p[1] for p in points], color="tab:blue", linewidth=1.0)
    ax.plot(grid, [p[2] for p in points], color="tab:blue", linewidth=1.0)
    measured = [(p[0], p[3]) for p in points if p[3] is not None]
    if measured:
        ax.plot(
            [m[0] for m in measured],
            [m[1] for m in measured],
            "ko",
            markersize=4.0,
            label="measured rate",
        )
    ax.set_xlabel("reliability exponent E (bits)")
    ax.set_ylabel("rate (bits)")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig, table


_BUILDERS = {
    "error_vs_threshold": _error_vs_threshold,
    "rate_vs_n": _rate_vs_n,
    "rr_tradeoff": _rr_tradeoff,
}


def _write_sidecar(path: Path, columns: tuple[str, ...], table: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for entry in table:
            writer.writerow([entry[name] for name in columns])
