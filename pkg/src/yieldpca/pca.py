"""
Principal components of yield-curve moves.

The covariance of rate changes (default) or rate levels is diagonalised
with a cyclic Jacobi eigensolver.  Columns of ``PcaModel.loadings`` are the
components; with typical curve data the first three read as level, slope
and curvature.

Sign convention: the largest-magnitude entry of every loading column is
positive, so identical inputs always give bit-identical loadings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .curve_store import YieldCurveSeries, diff_series

MODES = ("changes", "levels")


class PcaError(ValueError):
    pass


class TenorMismatchError(PcaError):
    pass


class DegenerateCovarianceError(PcaError):
    pass


class JacobiConvergenceError(ArithmeticError):
    pass


def covariance(data) -> np.ndarray:
    """Sample covariance of the columns of ``data`` (N-1 denominator)."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise PcaError(f"data must be 2-D, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise PcaError(f"covariance needs at least 2 observations, got {n}")
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (n - 1)
    return 0.5 * (s + s.T)


def _sign_normalise(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return vecs


def _lex_greater(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.nonzero(a != b)[0]
    return bool(diff.size) and a[diff[0]] > b[diff[0]]


def _sorted_order(vals: np.ndarray, vecs: np.ndarray, tie_tol: float) -> list[int]:
    # Descending by value; runs of values closer than tie_tol are ordered by
    # the first differing eigenvector entry (larger first).
    order = sorted(range(vals.size), key=lambda i: -vals[i])
    out: list[int] = []
    group = [order[0]]
    for i in order[1:]:
        if vals[group[-1]] - vals[i] < tie_tol:
            group.append(i)
        else:
            out.extend(_order_group(group, vecs))
            group = [i]
    out.extend(_order_group(group, vecs))
    return out


def _order_group(group, vecs):
    if len(group) == 1:
        return group
    ordered = []
    for i in group:
        pos = len(ordered)
        for k, j in enumerate(ordered):
            if _lex_greater(vecs[:, i], vecs[:, j]):
                pos = k
                break
        ordered.insert(pos, i)
    return ordered


def eigh_symmetric(S, tol: float = 1e-12, max_sweeps: int = 100):
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Sweeps over all (p, q) pairs in row order, annihilating each
    off-diagonal entry with a plane rotation, until the off-diagonal
    Frobenius norm drops to ``tol * ||S||_F``.

    Parameters
    ----------
    S : array_like, shape (m, m)
        Symmetric matrix (asymmetry above 1e-9 relative is rejected).
    tol : float
        Relative stopping threshold on the off-diagonal norm.
    max_sweeps : int
        Safety cap; exceeding it raises :class:`JacobiConvergenceError`.

    Returns
    -------
    eigenvalues : ndarray, shape (m,)
        Sorted descending.
    eigenvectors : ndarray, shape (m, m)
        Orthonormal columns matching ``eigenvalues``, sign-normalised.
    """
    a = np.array(S, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PcaError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PcaError("matrix has non-finite entries")
    m = a.shape[0]
    norm = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-9 * max(norm, 1.0):
        raise PcaError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(m)
    threshold = tol * norm

    off_mask = ~np.eye(m, dtype=bool)

    def off_norm():
        return float(np.linalg.norm(a[off_mask]))

    sweeps = 0
    while off_norm() > threshold:
        if sweeps >= max_sweeps:
            raise JacobiConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    vals = np.diag(a).copy()
    vecs = _sign_normalise(v)
    order = _sorted_order(vals, vecs, 1e-12 * max(norm, np.finfo(float).tiny))
    return vals[order], vecs[:, order]


@dataclass(frozen=True)
class PcaModel:
    """Fitted principal components.

    ``loadings[i, v]`` is the weight of component ``v`` on tenor ``i``.
    ``n_components`` is the number of components retained for scoring;
    loadings and eigenvalues always hold the full spectrum.
    """

    tenors: np.ndarray
    mode: str
    loadings: np.ndarray
    eigenvalues: np.ndarray
    explained_pct: np.ndarray
    column_means: np.ndarray
    factor_score_sd: np.ndarray
    n_components: int
    centered: bool = True

    @property
    def m(self) -> int:
        return self.tenors.size

    def component(self, v: int) -> np.ndarray:
        return self.loadings[:, v]

    def to_dict(self) -> dict:
        return {
            "tenors": self.tenors.tolist(),
            "mode": self.mode,
            "n_components": self.n_components,
            "centered": self.centered,
            "eigenvalues": self.eigenvalues.tolist(),
            "explained_pct": self.explained_pct.tolist(),
            "loadings": self.loadings.tolist(),
            "column_means": self.column_means.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        try:
            tenors = np.asarray(d["tenors"], dtype=float)
            eig = np.asarray(d["eigenvalues"], dtype=float)
            loadings = np.asarray(d["loadings"], dtype=float)
            model = cls(
                tenors=tenors,
                mode=d["mode"],
                loadings=loadings,
                eigenvalues=eig,
                explained_pct=np.asarray(d["explained_pct"], dtype=float),
                column_means=np.asarray(d["column_means"], dtype=float),
                factor_score_sd=np.sqrt(np.clip(eig, 0.0, None)),
                n_components=int(d.get("n_components", eig.size)),
                centered=bool(d.get("centered", True)),
            )
        except KeyError as exc:
            raise PcaError(f"model is missing field {exc.args[0]!r}") from None
        m = tenors.size
        if loadings.shape != (m, m) or eig.shape != (m,):
            raise PcaError(f"model arrays inconsistent with {m} tenors")
        if model.mode not in MODES:
            raise PcaError(f"unknown mode {model.mode!r}")
        return model

    @classmethod
    def load(cls, path) -> "PcaModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def model_input(series: YieldCurveSeries, mode: str) -> np.ndarray:
    """The matrix a model of ``mode`` is fitted to: rate changes or levels."""
    if mode == "changes":
        return diff_series(series).changes
    if mode == "levels":
        return series.rates
    raise PcaError(f"mode must be one of {MODES}, got {mode!r}")


def fit_pca(series: YieldCurveSeries, mode: str = "changes", k: int = 3,
            center: bool = True) -> PcaModel:
    """Fit principal components to a curve series.

    ``center=False`` (levels mode only) scores raw levels against the
    loadings without removing column means.
    """
    data = model_input(series, mode)
    m = data.shape[1]
    if not 1 <= k <= m:
        raise PcaError(f"component count must be in [1, {m}], got {k}")
    if data.shape[0] < 2:
        raise PcaError(f"mode {mode!r} needs at least 2 observations after preprocessing")
    if not center and mode != "levels":
        raise PcaError("uncentred scoring is only available in levels mode")

    s = covariance(data)
    total = float(np.trace(s))
    if total <= 0.0:
        raise DegenerateCovarianceError("covariance is identically zero; nothing to decompose")
    vals, vecs = eigh_symmetric(s)
    vals = np.clip(vals, 0.0, None)
    explained = 100.0 * vals / vals.sum()

    return PcaModel(
        tenors=series.tenors,
        mode=mode,
        loadings=vecs,
        eigenvalues=vals,
        explained_pct=explained,
        column_means=data.mean(axis=0),
        factor_score_sd=np.sqrt(vals),
        n_components=k,
        centered=center,
    )


@dataclass(frozen=True)
class FactorScores:
    scores: np.ndarray
    dates: tuple = ()

    @property
    def k(self) -> int:
        return self.scores.shape[1]


def _check_tenors(model: PcaModel, tenors):
    if model.tenors.shape != np.shape(tenors) or not np.allclose(model.tenors, tenors, rtol=0, atol=1e-12):
        raise TenorMismatchError(
            f"series tenors {list(tenors)} do not match model tenors {model.tenors.tolist()}"
        )


def factor_scores(model: PcaModel, series: YieldCurveSeries) -> FactorScores:
    """Project the series (preprocessed per the model's mode) on the retained components."""
    _check_tenors(model, series.tenors)
    data = model_input(series, model.mode)
    if model.centered:
        data = data - model.column_means
    dates = series.dates[1:] if model.mode == "changes" else series.dates
    return FactorScores(data @ model.loadings[:, : model.n_components], dates)


@dataclass(frozen=True)
class ResidualReport:
    tenors: np.ndarray
    k: int
    residual_sd: np.ndarray
    coefficients: np.ndarray  # shape (m, k + 1): constant then factor slopes


def residual_diagnostics(series: YieldCurveSeries, model: PcaModel, k: int) -> ResidualReport:
    """OLS of each tenor on a constant plus the first ``k`` factor scores.

    Residual standard deviation uses ``N' - k - 1`` degrees of freedom.
    """
    if not 0 <= k <= model.n_components:
        raise PcaError(f"k must be in [0, {model.n_components}], got {k}")
    scores = factor_scores(model, series).scores[:, :k]
    y = model_input(series, model.mode)
    n = y.shape[0]
    if n <= k + 1:
        raise PcaError(f"need more than {k + 1} observations for {k} factors, got {n}")
    x = np.column_stack([np.ones(n), scores])
    beta, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    sd = np.sqrt((resid * resid).sum(axis=0) / (n - k - 1))
    return ResidualReport(model.tenors, k, sd, beta.T)
