"""Reproducible synthetic curve histories for tests and demos."""

from __future__ import annotations

import datetime as dt

import numpy as np

from .curve_store import YieldCurveSeries

DEFAULT_TENORS = (0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0)


def nelson_siegel_basis(tenors, decay: float = 1.5) -> np.ndarray:
    """Level, slope and curvature shapes on ``tenors`` (columns)."""
    t = np.asarray(tenors, dtype=float) / decay
    slope = (1 - np.exp(-t)) / t
    return np.column_stack([np.ones_like(t), slope, slope - np.exp(-t)])


def simulate_curve_series(n_dates: int = 500, tenors=DEFAULT_TENORS, seed: int = 0,
                          start: dt.date = dt.date(2015, 1, 1),
                          vols=(0.0008, 0.0005, 0.0006), noise: float = 0.00005,
                          initial=(0.035, -0.015, 0.005)) -> YieldCurveSeries:
    """Random-walk Nelson-Siegel factors plus small idiosyncratic noise.

    Daily observations on consecutive calendar days starting at ``start``.
    """
    rng = np.random.default_rng(seed)
    basis = nelson_siegel_basis(tenors)
    steps = rng.normal(size=(n_dates, 3)) * np.asarray(vols)
    steps[0] = 0.0
    factors = np.asarray(initial) + np.cumsum(steps, axis=0)
    rates = factors @ basis.T + noise * rng.normal(size=(n_dates, len(tenors)))
    dates = tuple(start + dt.timedelta(days=i) for i in range(n_dates))
    return YieldCurveSeries(dates, np.asarray(tenors, dtype=float), rates)
