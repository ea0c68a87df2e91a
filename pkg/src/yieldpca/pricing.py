"""Discounting, present values and curve shifts under continuous compounding."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curve_store import CellParseError, CurveDataError, YieldCurve, spot_rate


class CashFlowError(ValueError):
    pass


@dataclass(frozen=True)
class CashFlow:
    time: float
    amount: float

    def __post_init__(self):
        if not (np.isfinite(self.time) and np.isfinite(self.amount)):
            raise CashFlowError(f"cash flow must be finite, got ({self.time}, {self.amount})")
        if self.time < 0:
            raise CashFlowError(f"cash-flow time must be >= 0, got {self.time}")


@dataclass(frozen=True, init=False)
class CashFlowStream:
    """Cash flows at strictly increasing times (years)."""

    times: np.ndarray
    amounts: np.ndarray

    def __init__(self, times, amounts):
        t = np.array(times, dtype=float).ravel()
        a = np.array(amounts, dtype=float).ravel()
        if t.shape != a.shape:
            raise CashFlowError(f"{t.size} times but {a.size} amounts")
        for ti, ai in zip(t, a):
            CashFlow(float(ti), float(ai))
        if np.any(np.diff(t) <= 0):
            raise CashFlowError(f"cash-flow times must be strictly increasing, got {t.tolist()}")
        t.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "amounts", a)

    @classmethod
    def from_flows(cls, flows) -> "CashFlowStream":
        flows = [f if isinstance(f, CashFlow) else CashFlow(*f) for f in flows]
        return cls([f.time for f in flows], [f.amount for f in flows])

    @classmethod
    def single(cls, time: float, amount: float) -> "CashFlowStream":
        return cls([time], [amount])

    @property
    def flows(self) -> list[CashFlow]:
        return [CashFlow(float(t), float(a)) for t, a in zip(self.times, self.amounts)]

    def scaled(self, factor: float) -> "CashFlowStream":
        return CashFlowStream(self.times, self.amounts * factor)

    def __len__(self):
        return self.times.size


def _require_nonempty(stream: CashFlowStream):
    if len(stream) == 0:
        raise CashFlowError("cash-flow stream is empty")


def discount_factor(curve: YieldCurve, t):
    """exp(-r(t) t) with r from the curve's interpolation."""
    r = spot_rate(curve, t)
    return np.exp(-r * np.asarray(t, dtype=float)) if np.ndim(t) else float(np.exp(-r * t))


def zero_price(face: float, curve: YieldCurve, t: float) -> float:
    if not face > 0:
        raise CashFlowError(f"face value must be positive, got {face}")
    return face * discount_factor(curve, t)


def present_value(stream: CashFlowStream, curve: YieldCurve) -> float:
    _require_nonempty(stream)
    return float(np.sum(stream.amounts * discount_factor(curve, stream.times)))


def shift_curve(curve: YieldCurve, direction, epsilon: float) -> YieldCurve:
    """Move every knot rate by ``epsilon * direction[i]``."""
    d = np.asarray(direction, dtype=float).ravel()
    if d.size != len(curve):
        raise CurveDataError(f"shift direction has {d.size} entries for {len(curve)} tenors")
    return YieldCurve(curve.tenors, curve.rates + epsilon * d, curve.interpolation)


def load_cash_flows(path) -> CashFlowStream:
    """Read a ``time_years,amount`` CSV."""
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["time_years", "amount"]:
        raise CashFlowError(f"{path}: header must be 'time_years,amount'")
    times, amounts = [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise CellParseError(f"{path}: row {i} needs 2 cells, got {len(row)}", row=i)
        try:
            times.append(float(row[0]))
            amounts.append(float(row[1]))
        except ValueError:
            raise CellParseError(f"{path}: row {i} has a non-numeric cell: {row}", row=i) from None
    stream = CashFlowStream(times, amounts)
    _require_nonempty(stream)
    return stream
