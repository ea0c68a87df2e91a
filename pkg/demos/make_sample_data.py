"""
Sample inputs for the demos and the CLI
=======================================

Writes a synthetic daily curve history (percent-quoted, like most
published sovereign curves) plus a liability, an instrument universe and
a small bond portfolio into ``data/``.
"""

from pathlib import Path

import numpy as np

from yieldpca.curve_store import write_curve_series
from yieldpca.synthetic import simulate_curve_series

OUT = Path(__file__).resolve().parent.parent / "data"
OUT.mkdir(exist_ok=True)

tenors = (0.25, 0.5, 1, 2, 3, 4, 5, 7, 10, 15, 20, 30)
series = simulate_curve_series(1500, tenors, seed=42, vols=(0.0005, 0.0008, 0.0012))

write_curve_series(series, OUT / "sample_curves_decimal.csv")
# same history quoted in percent, for --unit percent
with open(OUT / "sample_curves_percent.csv", "w", encoding="utf-8") as fh:
    fh.write("date," + ",".join(f"{t:g}" for t in tenors) + "\n")
    for d, row in zip(series.dates, series.rates):
        fh.write(d.isoformat() + "," + ",".join(f"{100 * r:.6f}" for r in row) + "\n")

# a pension-style liability: 20 annual payments
with open(OUT / "liabilities.csv", "w", encoding="utf-8") as fh:
    fh.write("time_years,amount\n")
    for t in range(1, 21):
        fh.write(f"{t},{100 * np.exp(-0.03 * t):.2f}\n")

# zero-coupon and coupon instruments
with open(OUT / "instruments.csv", "w", encoding="utf-8") as fh:
    fh.write("id,time_years,amount\n")
    for t in (2, 5, 10, 30):
        fh.write(f"zc{t}y,{t},1000\n")
    for t in range(1, 8):
        fh.write(f"bond7y,{t},{4 + (100 if t == 7 else 0)}\n")
    for t in range(1, 16):
        fh.write(f"bond15y,{t},{5 + (100 if t == 15 else 0)}\n")

with open(OUT / "portfolio.csv", "w", encoding="utf-8") as fh:
    fh.write("time_years,amount\n")
    for t in range(1, 11):
        fh.write(f"{t},{3.5 + (100 if t == 10 else 0)}\n")

print(f"wrote sample inputs to {OUT}")
