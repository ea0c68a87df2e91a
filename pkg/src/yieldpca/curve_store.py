"""
Yield-curve time series: loading, validation, differencing and summaries.

Rates are continuously-compounded annual spot rates stored as decimals
(0.03 == 3%).  Tenors are year fractions.  A CSV input looks like::

    date,0.25,0.5,1,2,5,10
    2020-01-02,0.0150,0.0161,0.0172,0.0190,0.0221,0.0263
    ...

Single-date curves (:class:`YieldCurve`) interpolate linearly on rates
between knots and extrapolate flat beyond the first and last tenor.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

RATE_BAND = (-0.5, 1.0)


class CurveDataError(ValueError):
    """Base class for malformed yield-curve input."""


class NonMonotoneTenorError(CurveDataError):
    pass


class DateParseError(CurveDataError):
    pass


class DateOrderError(CurveDataError):
    pass


class CellParseError(CurveDataError):
    """A rate cell is empty or not a number."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class InsufficientRowsError(CurveDataError):
    pass


class RateRangeError(CurveDataError):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def validate_tenors(tenors) -> np.ndarray:
    t = np.asarray(tenors, dtype=float).ravel()
    if t.size == 0:
        raise NonMonotoneTenorError("at least one tenor is required")
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise NonMonotoneTenorError(f"tenors must be positive and finite, got {t.tolist()}")
    if np.any(np.diff(t) <= 0):
        raise NonMonotoneTenorError(
            f"tenors must be strictly increasing without duplicates, got {t.tolist()}"
        )
    return t


@dataclass(frozen=True)
class YieldCurve:
    """Spot curve on a fixed tenor grid (linear on rates, flat extrapolation)."""

    tenors: np.ndarray
    rates: np.ndarray
    interpolation: str = "linear-flat"

    def __post_init__(self):
        tenors = validate_tenors(self.tenors)
        rates = np.asarray(self.rates, dtype=float).ravel()
        if rates.shape != tenors.shape:
            raise CurveDataError(
                f"curve has {tenors.size} tenors but {rates.size} rates"
            )
        if not np.all(np.isfinite(rates)):
            raise CurveDataError("curve rates must be finite")
        object.__setattr__(self, "tenors", _frozen(tenors))
        object.__setattr__(self, "rates", _frozen(rates))

    @classmethod
    def flat(cls, rate: float, tenors=(1.0, 30.0)) -> "YieldCurve":
        tenors = np.asarray(tenors, dtype=float)
        return cls(tenors, np.full(tenors.shape, float(rate)))

    def __len__(self):
        return self.tenors.size


@dataclass(frozen=True)
class YieldCurveSeries:
    """Dated N x m matrix of spot rates.

    Parameters
    ----------
    dates : sequence of datetime.date
        Strictly increasing observation dates.
    tenors : array_like, shape (m,)
        Strictly increasing tenors in years.
    rates : array_like, shape (N, m)
        Decimal spot rates, N >= 2.
    """

    dates: tuple
    tenors: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        tenors = validate_tenors(self.tenors)
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[1] != tenors.size:
            raise CurveDataError(
                f"rates must have shape (N, {tenors.size}), got {rates.shape}"
            )
        if rates.shape[0] < 2:
            raise InsufficientRowsError(
                f"a curve series needs at least 2 dates, got {rates.shape[0]}"
            )
        dates = tuple(self.dates)
        if len(dates) != rates.shape[0]:
            raise CurveDataError(
                f"{len(dates)} dates for {rates.shape[0]} rate rows"
            )
        for k in range(1, len(dates)):
            if not dates[k] > dates[k - 1]:
                raise DateOrderError(
                    f"dates must be strictly increasing: {dates[k - 1]} then {dates[k]}"
                )
        if not np.all(np.isfinite(rates)):
            r, c = np.argwhere(~np.isfinite(rates))[0]
            raise CellParseError(f"non-finite rate at row {r}, tenor {tenors[c]}", int(r), str(tenors[c]))
        lo, hi = RATE_BAND
        bad = (rates <= lo) | (rates >= hi)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise RateRangeError(
                f"rate {rates[r, c]} at row {r}, tenor {tenors[c]} outside ({lo}, {hi}); "
                "percent-quoted data needs unit='percent'"
            )
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "tenors", _frozen(tenors))
        object.__setattr__(self, "rates", _frozen(rates))

    @property
    def shape(self):
        return self.rates.shape


@dataclass(frozen=True)
class RateChangeSeries:
    """First differences of a :class:`YieldCurveSeries`.

    ``dates[k]`` is the date at the *end* of the k-th change.
    """

    dates: tuple
    tenors: np.ndarray
    changes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "tenors", _frozen(self.tenors))
        object.__setattr__(self, "changes", _frozen(self.changes))


@dataclass(frozen=True)
class SummaryStats:
    """Per-tenor sample moments and the correlation matrix.

    Correlations involving a zero-variance tenor are undefined; they are
    reported as NaN and flagged in ``undefined``.
    """

    tenors: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    correlation: np.ndarray
    undefined: np.ndarray = field(repr=False)


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise DateParseError(f"row {row}: cannot parse date {text!r} (expected YYYY-MM-DD)") from None


def load_curve_series(path, unit: str = "decimal") -> YieldCurveSeries:
    """Read a curve CSV (``date,<tenor>,...`` header) into a validated series.

    ``unit='percent'`` divides every rate by 100.  Row numbers in error
    messages count data rows from 1 (the header is row 0).
    """
    if unit not in ("percent", "decimal"):
        raise ValueError(f"unit must be 'percent' or 'decimal', got {unit!r}")
    scale = 0.01 if unit == "percent" else 1.0

    with open(Path(path), newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InsufficientRowsError(f"{path}: empty file")

    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0].lower() != "date":
        raise CurveDataError(f"{path}: header must be 'date,<tenor>,...', got {rows[0]}")
    try:
        tenors = [float(c) for c in header[1:]]
    except ValueError:
        raise CurveDataError(f"{path}: tenor headers must be numbers in years, got {header[1:]}") from None
    validate_tenors(tenors)

    body = rows[1:]
    if len(body) < 2:
        raise InsufficientRowsError(f"{path}: need at least 2 data rows, got {len(body)}")

    dates = []
    rates = np.empty((len(body), len(tenors)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise CellParseError(
                f"row {i}: expected {len(header)} cells, got {len(row)}", row=i
            )
        dates.append(_parse_date(row[0], i))
        for j, cell in enumerate(row[1:]):
            col = header[j + 1]
            if not cell.strip():
                raise CellParseError(f"row {i}, column {col}: missing rate", row=i, column=col)
            try:
                rates[i - 1, j] = float(cell)
            except ValueError:
                raise CellParseError(
                    f"row {i}, column {col}: non-numeric rate {cell!r}", row=i, column=col
                ) from None
    return YieldCurveSeries(tuple(dates), np.array(tenors), rates * scale)


def write_curve_series(series: YieldCurveSeries, path, precision: int = 10):
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date"] + [format_tenor(t) for t in series.tenors])
        for d, row in zip(series.dates, series.rates):
            w.writerow([d.isoformat()] + [f"{x:.{precision}f}" for x in row])


def format_tenor(t: float) -> str:
    return f"{t:g}"


def diff_series(series: YieldCurveSeries) -> RateChangeSeries:
    """Single-lag differences over consecutive rows (calendar gaps ignored)."""
    rates = series.rates
    if rates.shape[0] < 2:
        raise InsufficientRowsError("differencing needs at least 2 rows")
    return RateChangeSeries(series.dates[1:], series.tenors, rates[1:] - rates[:-1])


def summary_stats(series: YieldCurveSeries) -> SummaryStats:
    x = series.rates
    if x.shape[0] < 2:
        raise InsufficientRowsError("summary statistics need at least 2 rows")
    mean = x.mean(axis=0)
    xc = x - mean
    std = np.sqrt((xc * xc).sum(axis=0) / (x.shape[0] - 1))

    zero = std == 0
    undefined = zero[:, None] | zero[None, :]
    safe = np.where(zero, 1.0, std)
    z = xc / safe
    corr = z.T @ z / (x.shape[0] - 1)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    corr[undefined] = np.nan
    corr.setflags(write=False)
    undefined.setflags(write=False)
    return SummaryStats(series.tenors, _frozen(mean), _frozen(std), corr, undefined)


def snapshot(series: YieldCurveSeries, index: int) -> YieldCurve:
    n = series.rates.shape[0]
    if not 0 <= index < n:
        raise IndexError(f"date index {index} out of range for {n} dates")
    return YieldCurve(series.tenors, series.rates[index])


def interpolate_on_tenors(tenors, values, t):
    """Linear interpolation of knot values with flat extrapolation."""
    return np.interp(t, tenors, values)


def spot_rate(curve: YieldCurve, t):
    """Spot rate at ``t`` years; scalar in, float out; array in, array out."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0) or not np.all(np.isfinite(ta)):
        raise ValueError(f"time must be finite and non-negative, got {t}")
    r = interpolate_on_tenors(curve.tenors, curve.rates, ta)
    return float(r) if ta.ndim == 0 else r
