"""Regenerate golden_immunize_4zc.json with the test-only dense solver.

Run from the repository root:  python tests/data/make_golden.py
"""

import json
import sys
from pathlib import Path

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE.parent))

from oracles import gauss_solve, zero_coupon_constraints  # noqa: E402
from yieldpca.curve_store import load_curve_series  # noqa: E402
from yieldpca.pca import fit_pca  # noqa: E402

series = load_curve_series(HERE / "curves.csv")
model = fit_pca(series, "changes", 3)
maturities = [1.0, 3.0, 5.0, 10.0]
a, b = zero_coupon_constraints(
    maturities, 1000.0, 4.0, 1000.0, list(series.tenors), list(series.rates[-1]),
    model.loadings.tolist(), 3)
x = gauss_solve(a, b)
golden = {"ids": ["zc1y", "zc3y", "zc5y", "zc10y"], "weights": x, "liability_pv": b[0]}
(HERE / "golden_immunize_4zc.json").write_text(json.dumps(golden, indent=2) + "\n")
print(golden)
