"""
Duration and Value-at-Risk measures.

Key-rate durations (KRD) bump one curve knot by +/-100bp; principal
component durations (PCD) project the KRD vector on PCA loadings; PC-VaR
combines PCDs with factor volatilities under a normal model::

    VaR_c = V0 * z_c * sqrt(sum_v (PCD_v * sigma_v)**2)

``paper_compat`` switches reproduce a reference convention in which the
KRD bump is a flat 1% *price* move (so every KRD is -1), factor
volatilities are a uniform 0.1, and z-scores are rounded to 3 decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from scipy.optimize import brentq

from .curve_store import YieldCurve, interpolate_on_tenors
from .pca import PcaModel
from .pricing import CashFlowStream, discount_factor, present_value, shift_curve

KRD_BUMP = 0.01
KRD_MODES = ("standard", "paper_compat")
PAPER_UNIFORM_SIGMA = 0.1


class RiskError(ValueError):
    pass


def key_rate_duration(stream: CashFlowStream, curve: YieldCurve, key_index: int,
                      mode: str = "standard") -> float:
    m = len(curve)
    if not 0 <= key_index < m:
        raise IndexError(f"key index {key_index} out of range for {m} tenors")
    if mode not in KRD_MODES:
        raise RiskError(f"KRD mode must be one of {KRD_MODES}, got {mode!r}")
    p0 = present_value(stream, curve)
    if p0 == 0:
        raise RiskError("stream has zero present value; KRD undefined")
    if mode == "paper_compat":
        # P(-) = 0.99 P0, P(+) = 1.01 P0: the ratio is -1 for any stream
        return -1.0
    bump = np.zeros(m)
    bump[key_index] = KRD_BUMP
    p_minus = present_value(stream, shift_curve(curve, bump, -1.0))
    p_plus = present_value(stream, shift_curve(curve, bump, 1.0))
    return (p_minus - p_plus) / (2 * KRD_BUMP * p0)


def krd_vector(stream: CashFlowStream, curve: YieldCurve, mode: str = "standard") -> np.ndarray:
    return np.array([key_rate_duration(stream, curve, j, mode) for j in range(len(curve))])


def effective_duration(stream: CashFlowStream, curve: YieldCurve, bump: float = KRD_BUMP) -> float:
    """Parallel-shift effective duration with a +/-``bump`` move of every knot."""
    ones = np.ones(len(curve))
    p0 = present_value(stream, curve)
    p_minus = present_value(stream, shift_curve(curve, ones, -bump))
    p_plus = present_value(stream, shift_curve(curve, ones, bump))
    return (p_minus - p_plus) / (2 * bump * p0)


def _loadings(model) -> np.ndarray:
    return model.loadings if isinstance(model, PcaModel) else np.asarray(model, dtype=float)


def pc_duration(krd, model, k: int | None = None) -> np.ndarray:
    """PCD_v = sum_i KRD_i * loadings[i, v] for the first ``k`` components.

    ``model`` may be a :class:`PcaModel` or a raw (m, m) loadings matrix.
    """
    krd = np.asarray(krd, dtype=float).ravel()
    u = _loadings(model)
    if k is None:
        k = model.n_components if isinstance(model, PcaModel) else u.shape[1]
    if krd.size != u.shape[0]:
        raise RiskError(f"KRD vector has {krd.size} entries, model has {u.shape[0]} tenors")
    if not 0 <= k <= u.shape[1]:
        raise RiskError(f"k must be in [0, {u.shape[1]}], got {k}")
    return krd @ u[:, :k]


def z_score(confidence: float, rounded: bool = False) -> float:
    """One-sided standard-normal quantile; ``rounded`` gives 3 decimals (1.645, 2.326)."""
    if not 0.5 < confidence < 1.0:
        raise RiskError(f"confidence must be in (0.5, 1), got {confidence}")
    z = NormalDist().inv_cdf(confidence)
    return round(z, 3) if rounded else z


@dataclass(frozen=True)
class VarConfig:
    initial_value: float
    confidence: float = 0.95
    sigma_policy: str = "model"
    uniform_sigma: float = PAPER_UNIFORM_SIGMA
    rounded_z: bool = False
    z: float = field(init=False)

    def __post_init__(self):
        if not self.initial_value > 0:
            raise RiskError(f"initial value must be positive, got {self.initial_value}")
        if self.sigma_policy not in ("model", "uniform"):
            raise RiskError(f"sigma_policy must be 'model' or 'uniform', got {self.sigma_policy!r}")
        if self.uniform_sigma < 0:
            raise RiskError("uniform sigma must be non-negative")
        object.__setattr__(self, "z", z_score(self.confidence, self.rounded_z))

    @classmethod
    def paper_compat(cls, initial_value: float, confidence: float) -> "VarConfig":
        return cls(initial_value, confidence, "uniform", PAPER_UNIFORM_SIGMA, True)

    @property
    def policy_label(self) -> str:
        return "model" if self.sigma_policy == "model" else f"uniform({self.uniform_sigma:g})"


def factor_sigmas(cfg: VarConfig, k: int, model: PcaModel | None = None) -> np.ndarray:
    if cfg.sigma_policy == "uniform":
        return np.full(k, cfg.uniform_sigma)
    if model is None:
        raise RiskError("sigma_policy 'model' needs a fitted PCA model")
    if k > model.m:
        raise RiskError(f"model has only {model.m} components")
    return np.asarray(model.factor_score_sd[:k], dtype=float)


def pc_var(pcd, cfg: VarConfig, sigmas) -> float:
    pcd = np.asarray(pcd, dtype=float).ravel()
    sigmas = np.asarray(sigmas, dtype=float).ravel()
    if pcd.shape != sigmas.shape:
        raise RiskError(f"{pcd.size} PCDs but {sigmas.size} sigmas")
    if np.any(sigmas < 0):
        raise RiskError("factor sigmas must be non-negative")
    return float(cfg.initial_value * cfg.z * np.sqrt(np.sum((pcd * sigmas) ** 2)))


def _positive_pv(pv: float):
    if not pv > 0:
        raise RiskError(f"duration needs a positive present value, got {pv}")


def macaulay_duration(stream: CashFlowStream, y: float) -> float:
    """PV-weighted mean time at a flat continuously-compounded yield ``y``."""
    if len(stream) == 0:
        raise RiskError("cash-flow stream is empty")
    w = stream.amounts * np.exp(-y * stream.times)
    pv = float(w.sum())
    _positive_pv(pv)
    return float(np.sum(w / pv * stream.times))


def fisher_weil_duration(stream: CashFlowStream, curve: YieldCurve) -> float:
    pv = present_value(stream, curve)
    _positive_pv(pv)
    w = stream.amounts * discount_factor(curve, stream.times)
    return float(np.sum(w / pv * stream.times))


def factor_direction_duration(stream: CashFlowStream, curve: YieldCurve, loading,
                              tenors=None, flow_count: int | None = None) -> float:
    """Fisher-Weil-style duration weighted by a loading column.

    ``sqrt(N) / S(0) * sum_i B_i(0) C_i t_i u(t_i)`` where ``u(t_i)`` is the
    loading linearly interpolated (flat beyond the ends) at each flow time.
    ``N`` defaults to the number of flows in ``stream``; ``flow_count``
    overrides it.  ``tenors`` defaults to the curve's tenors.
    """
    pv = present_value(stream, curve)
    _positive_pv(pv)
    tenors = curve.tenors if tenors is None else np.asarray(tenors, dtype=float)
    loading = np.asarray(loading, dtype=float).ravel()
    if loading.size != tenors.size:
        raise RiskError(f"loading has {loading.size} entries for {tenors.size} tenors")
    n = len(stream) if flow_count is None else flow_count
    u = interpolate_on_tenors(tenors, loading, stream.times)
    w = stream.amounts * discount_factor(curve, stream.times)
    return float(np.sqrt(n) * np.sum(w / pv * stream.times * u))


def implied_flat_yield(stream: CashFlowStream, curve: YieldCurve) -> float:
    """Flat continuous yield repricing the stream to its curve PV."""
    pv = present_value(stream, curve)
    _positive_pv(pv)

    def gap(y):
        return float(np.sum(stream.amounts * np.exp(-y * stream.times))) - pv

    if np.all(stream.times == 0):
        return 0.0
    return float(brentq(gap, -0.49, 0.99, xtol=1e-15, rtol=4 * np.finfo(float).eps))


@dataclass(frozen=True)
class DurationReport:
    macaulay: float
    fisher_weil: float
    factor_durations: np.ndarray
    flat_yield: float | None = None

    def to_dict(self) -> dict:
        return {
            "macaulay": self.macaulay,
            "fisher_weil": self.fisher_weil,
            "factor_durations": [float(x) for x in self.factor_durations],
            "flat_yield": self.flat_yield,
        }


def duration_report(stream: CashFlowStream, curve: YieldCurve, loadings, k: int,
                    flat_yield: float | None = None, tenors=None) -> DurationReport:
    """Macaulay, Fisher-Weil and the first ``k`` factor-direction durations."""
    u = _loadings(loadings)
    y = implied_flat_yield(stream, curve) if flat_yield is None else flat_yield
    fdd = np.array([factor_direction_duration(stream, curve, u[:, v], tenors) for v in range(k)])
    return DurationReport(
        macaulay=macaulay_duration(stream, y),
        fisher_weil=fisher_weil_duration(stream, curve),
        factor_durations=fdd,
        flat_yield=y,
    )
