"""Epidemic-control comparison plots from ensemble summary CSV files.

Pure file-in/file-out: reads the ``summary.csv`` schema emitted by the
simulation CLI (``day,compartment,mean,stderr,min,p05,p95,max,closed_form``)
plus an optional historical ``date,confirmed,deaths`` series, and renders
one stacked panel per requested compartment: historical data as a solid
black line, the ensemble mean with a thin 5/95-percentile band, and the
closed-form expectation dashed where the CSV provides it.  Every plotted
series keeps exactly one point per CSV row; nothing is resampled.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SUMMARY_HEADER = ("day", "compartment", "mean", "stderr", "min", "p05", "p95",
                  "max", "closed_form")
SERIES_HEADER = ("date", "confirmed", "deaths")

# Which historical column, if any, overlays each compartment panel.
HISTORICAL_COLUMN = {"I": "confirmed", "D": "deaths"}

PANEL_TITLES = {
    "S": "Susceptible cases",
    "I": "Confirmed infected cases",
    "R": "Recovered cases",
    "D": "Deceased cases",
    "B": "Spent budget",
}

Y_SCALES = ("linear", "log")


class FigureInputError(ValueError):
    """Missing columns, unknown compartments or malformed inputs."""


@dataclass(frozen=True)
class FigureSpec:
    """One render request: inputs, compartment selection, scale, output."""

    summary_path: Path
    output_path: Path
    compartments: tuple[str, ...]
    y_scale: str = "linear"
    series_path: Path | None = None

    def __post_init__(self) -> None:
        if not self.compartments:
            raise FigureInputError("at least one compartment must be selected")
        if self.y_scale not in Y_SCALES:
            raise FigureInputError(f"y_scale must be one of {Y_SCALES}, got {self.y_scale!r}")


def load_summary(path: Path) -> dict[str, dict[str, np.ndarray]]:
    """Parse a summary CSV into per-compartment column arrays."""
    rows: dict[str, list[dict[str, str]]] = {}
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != SUMMARY_HEADER:
            raise FigureInputError(
                f"{path}: expected header {','.join(SUMMARY_HEADER)}, got {header!r}"
            )
        for row in reader:
            if not row:
                continue
            if len(row) != len(SUMMARY_HEADER):
                raise FigureInputError(f"{path}: malformed row {row!r}")
            record = dict(zip(SUMMARY_HEADER, row))
            rows.setdefault(record["compartment"], []).append(record)

    out: dict[str, dict[str, np.ndarray]] = {}
    for compartment, records in rows.items():
        records.sort(key=lambda r: int(r["day"]))
        columns: dict[str, np.ndarray] = {
            "day": np.array([int(r["day"]) for r in records])
        }
        for key in ("mean", "stderr", "min", "p05", "p95", "max"):
            columns[key] = np.array([float(r[key]) for r in records])
        columns["closed_form"] = np.array(
            [float(r["closed_form"]) if r["closed_form"] else np.nan for r in records]
        )
        out[compartment] = columns
    if not out:
        raise FigureInputError(f"{path}: no data rows")
    return out


def load_series(path: Path) -> dict[str, np.ndarray]:
    """Parse a historical date,confirmed,deaths CSV into column arrays."""
    confirmed: list[float] = []
    deaths: list[float] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != SERIES_HEADER:
            raise FigureInputError(
                f"{path}: expected header {','.join(SERIES_HEADER)}, got {header!r}"
            )
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise FigureInputError(f"{path}: malformed row {row!r}")
            confirmed.append(float(row[1]))
            deaths.append(float(row[2]))
    return {"confirmed": np.asarray(confirmed), "deaths": np.asarray(deaths)}


def render(spec: FigureSpec):
    """Render the requested panels and write the image; returns the figure."""
    summary = load_summary(spec.summary_path)
    missing = [c for c in spec.compartments if c not in summary]
    if missing:
        raise FigureInputError(
            f"compartments {missing} not present in {spec.summary_path} "
            f"(available: {sorted(summary)})"
        )
    series = load_series(spec.series_path) if spec.series_path is not None else None

    n_panels = len(spec.compartments)
    fig, axes = plt.subplots(
        n_panels, 1, figsize=(8, 2.8 * n_panels), sharex=True, squeeze=False
    )
    for ax, compartment in zip(axes[:, 0], spec.compartments):
        columns = summary[compartment]
        days = columns["day"]
        ax.fill_between(days, columns["p05"], columns["p95"],
                        color="tab:blue", alpha=0.15, linewidth=0)
        ax.plot(days, columns["p05"], color="tab:blue", linewidth=0.6,
                label="5th percentile")
        ax.plot(days, columns["p95"], color="tab:blue", linewidth=0.6,
                label="95th percentile")
        ax.plot(days, columns["mean"], color="tab:blue", linewidth=1.6,
                label="ensemble mean")
        if not np.isnan(columns["closed_form"]).all():
            ax.plot(days, columns["closed_form"], color="tab:red",
                    linewidth=1.2, linestyle="--", label="closed form")
        history_key = HISTORICAL_COLUMN.get(compartment)
        if series is not None and history_key is not None:
            history = series[history_key]
            ax.plot(np.arange(len(history)), history, color="black",
                    linewidth=1.8, label=f"historical {history_key}")
        ax.set_yscale(spec.y_scale)
        ax.set_title(PANEL_TITLES.get(compartment, compartment))
        ax.set_ylabel("cases")
        ax.legend(loc="best", fontsize=8)
    axes[-1, 0].set_xlabel("day")
    fig.tight_layout()
    fig.savefig(spec.output_path)
    return fig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sird-figures",
        description="Render comparison plots from an ensemble summary CSV",
    )
    parser.add_argument("--summary", required=True, help="path to summary.csv")
    parser.add_argument("--data", default=None,
                        help="optional historical date,confirmed,deaths CSV to overlay")
    parser.add_argument("--compartments", default="I,D",
                        help="comma-separated compartments to plot (default I,D)")
    parser.add_argument("--y-scale", choices=Y_SCALES, default="linear")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            summary_path=Path(args.summary),
            output_path=Path(args.out),
            compartments=tuple(c for c in args.compartments.split(",") if c),
            y_scale=args.y_scale,
            series_path=None if args.data is None else Path(args.data),
        )
        fig = render(spec)
        plt.close(fig)
    except (FigureInputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
