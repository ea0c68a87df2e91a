"""
Level, slope and curvature from a curve history
===============================================

Fit principal components to daily rate changes, look at how much of the
variance the first three explain, and check how well three factors
reconstruct each tenor.  Run ``make_sample_data.py`` first.
"""

from pathlib import Path

import numpy as np

from yieldpca import fit_pca, load_curve_series, residual_diagnostics, summary_stats
from yieldpca.pca import model_input

DATA = Path(__file__).resolve().parent.parent / "data"

series = load_curve_series(DATA / "sample_curves_percent.csv", unit="percent")
print(f"{series.shape[0]} dates x {series.shape[1]} tenors, "
      f"{series.dates[0]} .. {series.dates[-1]}")

stats = summary_stats(series)
print("mean curve (%):", np.round(100 * stats.mean, 3))

# %%
# Principal components of daily changes.  The sign convention makes the
# largest entry of every loading column positive.
model = fit_pca(series, mode="changes", k=3)
for name, pct in zip(("level", "slope", "curvature"), model.explained_pct):
    print(f"{name:>10}: {pct:7.3f}% of variance")
print(f"first three together: {model.explained_pct[:3].sum():.3f}%")

print("\nloadings (tenor, level, slope, curvature)")
for t, row in zip(model.tenors, model.loadings[:, :3]):
    print(f"{t:6g} " + " ".join(f"{x:+.3f}" for x in row))

# %%
# Residual standard deviations after regressing each tenor's changes on
# the first three factor scores, in basis points.
resid = residual_diagnostics(series, model, 3)
sd = np.std(model_input(series, "changes"), axis=0, ddof=1)
print("\ntenor   SD(bp)  resid SD(bp)")
for t, s, r in zip(model.tenors, sd, resid.residual_sd):
    print(f"{t:5g} {1e4 * s:8.2f} {1e4 * r:10.3f}")

# %%
# The same fit on levels, as some older workflows do.
levels = fit_pca(series, mode="levels", k=3)
print("\nlevels mode explained:", np.round(levels.explained_pct[:3], 3))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    for v, name in enumerate(("Level", "Slope", "Curvature")):
        ax.plot(model.tenors, model.loadings[:, v], "-x", label=name)
    ax.set_xlabel("tenor (years)")
    ax.set_ylabel("factor loading")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(__file__).with_suffix(".png"), dpi=120)
    print("\nsaved", Path(__file__).with_suffix(".png").name)
except ImportError:
    pass
