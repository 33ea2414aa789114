"""Historical case-series ingestion and mean-replacing rate estimation.

The input schema is a plain CSV with header ``date,confirmed,deaths``:
ISO-8601 dates on a strictly daily grid, a nonnegative confirmed-cases
column used directly as the infected count, and a cumulative nonnegative
deaths column.  Real feeds differ in both respects, so the loader offers
opt-in transforms: ``deaths_daily`` accumulates a daily-deaths column,
``accumulate_confirmed`` turns daily new cases into running totals, and
``active_window`` builds a trailing-window active-case proxy.  All are off
by default; the estimators consume whatever the loaded series holds.

Both estimators average per-day rearrangements of the recursion over the
data, skipping days with a zero confirmed count (the rearrangements are
undefined there).  The infection-rate estimator assumes the full resource
budget was committed (a unit feedback gain), so the whole control term
collapses into the supplied mean effectiveness.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

_HEADER = ("date", "confirmed", "deaths")


class CaseSeriesError(ValueError):
    """Base class for case-series parse/validation failures."""


class DateGapError(CaseSeriesError):
    """The date column is not a strictly increasing daily grid."""


class NonMonotoneDeathsError(CaseSeriesError):
    """The cumulative deaths column decreases somewhere."""


class NegativeCountError(CaseSeriesError):
    """A confirmed or deaths value is negative."""


class EstimationError(ValueError):
    """No usable data points remain for an estimator."""


@dataclass(frozen=True)
class CaseSeries:
    """Aligned daily (date, confirmed, cumulative deaths) series."""

    dates: tuple[dt.date, ...]
    confirmed: np.ndarray
    deaths: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.dates)
        if n < 2:
            raise CaseSeriesError(f"need at least 2 rows, got {n}")
        if len(self.confirmed) != n or len(self.deaths) != n:
            raise CaseSeriesError("date, confirmed and deaths columns must align")
        if self.confirmed.min() < 0 or self.deaths.min() < 0:
            raise NegativeCountError("confirmed and deaths values must be nonnegative")
        for prev, cur in zip(self.dates, self.dates[1:]):
            expected = prev + dt.timedelta(days=1)
            if cur != expected:
                raise DateGapError(
                    f"dates must advance one day at a time; missing {expected.isoformat()} "
                    f"(found {cur.isoformat()} after {prev.isoformat()})"
                )
        if np.any(np.diff(self.deaths) < 0):
            day = int(np.nonzero(np.diff(self.deaths) < 0)[0][0])
            raise NonMonotoneDeathsError(
                f"cumulative deaths decrease on {self.dates[day + 1].isoformat()}"
            )

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class EstimateResult:
    """Estimated death and infection rates plus skip bookkeeping."""

    d_i_hat: float
    delta_hat: float
    skipped_days: int
    sample_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "d_i_hat": self.d_i_hat,
            "delta_hat": self.delta_hat,
            "skipped_days": self.skipped_days,
            "sample_count": self.sample_count,
        }


def load_series(
    path: str | Path,
    *,
    deaths_daily: bool = False,
    accumulate_confirmed: bool = False,
    active_window: int | None = None,
) -> CaseSeries:
    """Load and validate a case series from the ``date,confirmed,deaths`` CSV."""
    if accumulate_confirmed and active_window is not None:
        raise ValueError("accumulate_confirmed and active_window are mutually exclusive")
    path = Path(path)
    dates: list[dt.date] = []
    confirmed: list[float] = []
    deaths: list[float] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != _HEADER:
            raise CaseSeriesError(
                f"{path}: expected header {','.join(_HEADER)!r}, got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CaseSeriesError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                dates.append(dt.date.fromisoformat(row[0].strip()))
            except ValueError as exc:
                raise CaseSeriesError(f"{path}:{lineno}: bad date {row[0]!r}") from exc
            try:
                confirmed.append(float(row[1]))
                deaths.append(float(row[2]))
            except ValueError as exc:
                raise CaseSeriesError(f"{path}:{lineno}: bad count in {row[1:]!r}") from exc

    confirmed_arr = np.asarray(confirmed, dtype=np.float64)
    deaths_arr = np.asarray(deaths, dtype=np.float64)
    if len(confirmed_arr) and (confirmed_arr.min() < 0 or deaths_arr.min() < 0):
        raise NegativeCountError(f"{path}: confirmed and deaths values must be nonnegative")
    if deaths_daily:
        deaths_arr = np.cumsum(deaths_arr)
    if accumulate_confirmed:
        confirmed_arr = np.cumsum(confirmed_arr)
    if active_window is not None:
        if active_window < 1:
            raise ValueError(f"active_window must be positive, got {active_window}")
        kernel = np.ones(active_window)
        confirmed_arr = np.convolve(confirmed_arr, kernel)[: len(confirmed_arr)]
    return CaseSeries(dates=tuple(dates), confirmed=confirmed_arr, deaths=deaths_arr)


def write_series(series: CaseSeries, path: str | Path) -> None:
    """Write a series back out in the exact input schema (round-trip safe)."""
    path = Path(path)
    with path.open("w", newline="\n") as handle:
        handle.write(",".join(_HEADER) + "\n")
        for date, c, d in zip(series.dates, series.confirmed, series.deaths):
            handle.write(f"{date.isoformat()},{float(c)!r},{float(d)!r}\n")


def _usable(series: CaseSeries) -> np.ndarray:
    # Day k is usable when confirmed[k] != 0; only days 0..n-2 have a
    # next-day difference to pair with.
    return np.nonzero(series.confirmed[:-1] != 0)[0]


def estimate_death_rate(series: CaseSeries) -> float:
    """Mean of (deaths[k+1] - deaths[k]) / confirmed[k] over usable days."""
    usable = _usable(series)
    if len(usable) == 0:
        raise EstimationError("every day has zero confirmed cases; cannot estimate")
    increments = np.diff(series.deaths)
    return float(np.mean(increments[usable] / series.confirmed[usable]))


def estimate_delta(series: CaseSeries, v_mean: float, d_i_hat: float) -> float:
    """Mean of (confirmed[k+1]/confirmed[k] - 1 + d_i_hat + v_mean) over usable days.

    This is the per-day rearrangement of the infected recursion under a
    unit-gain policy with the effectiveness replaced by its mean.
    """
    if not 0 < v_mean <= 1:
        raise ValueError(f"v_mean must lie in (0, 1], got {v_mean}")
    usable = _usable(series)
    if len(usable) == 0:
        raise EstimationError("every day has zero confirmed cases; cannot estimate")
    ratios = series.confirmed[usable + 1] / series.confirmed[usable]
    return float(np.mean(ratios - 1.0 + d_i_hat + v_mean))


def estimate_all(series: CaseSeries, v_mean: float) -> EstimateResult:
    """Run both estimators in order: the death rate first, then the infection rate."""
    d_i_hat = estimate_death_rate(series)
    delta_hat = estimate_delta(series, v_mean, d_i_hat)
    usable = len(_usable(series))
    total = len(series) - 1
    return EstimateResult(
        d_i_hat=d_i_hat,
        delta_hat=delta_hat,
        skipped_days=total - usable,
        sample_count=usable,
    )


__all__ = [
    "CaseSeries",
    "CaseSeriesError",
    "DateGapError",
    "NonMonotoneDeathsError",
    "NegativeCountError",
    "EstimationError",
    "EstimateResult",
    "load_series",
    "write_series",
    "estimate_death_rate",
    "estimate_delta",
    "estimate_all",
]
