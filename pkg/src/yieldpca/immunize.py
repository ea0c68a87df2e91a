"""
Multi-factor immunization.

Find invested amounts ``x_j`` in candidate instruments so that the
portfolio matches the liability's present value and its durations along
the first ``k`` principal-component directions::

    sum_j x_j            = S_L
    sum_j x_j * D_v(j)   = S_L * D_v(L)      v = 1..k

Weights are currency values, so both kinds of row are linear in ``x``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .curve_store import CellParseError, YieldCurve
from .pca import PcaModel, TenorMismatchError
from .pricing import CashFlowError, CashFlowStream, present_value, shift_curve
from .risk import factor_direction_duration

POLICIES = ("exact", "least_norm", "auto")
CONVENTIONS = ("common", "per_stream")
RESIDUAL_TOL = 1e-8


class ImmunizationError(ValueError):
    pass


class InfeasibleError(ImmunizationError):
    """No weights satisfy the matching conditions; ``residual`` is the best achieved."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = None if residual is None else np.asarray(residual, dtype=float)


@dataclass(frozen=True)
class Instrument:
    id: str
    stream: CashFlowStream


@dataclass(frozen=True)
class ImmunizationProblem:
    """Liability, instrument universe, pricing curve and factor model.

    ``convention`` controls the sqrt(N) factor in the factor durations:
    ``"common"`` uses the liability's flow count for every stream, which
    makes the duration rows exact first-order sensitivity matches;
    ``"per_stream"`` uses each stream's own flow count.
    """

    liability: CashFlowStream
    instruments: tuple
    curve: YieldCurve
    model: PcaModel
    k: int = 3
    convention: str = "common"

    def __post_init__(self):
        object.__setattr__(self, "instruments", tuple(self.instruments))
        if not self.instruments:
            raise ImmunizationError("at least one instrument is required")
        ids = [ins.id for ins in self.instruments]
        if len(set(ids)) != len(ids):
            raise ImmunizationError(f"instrument ids must be unique, got {ids}")
        if not 0 <= self.k <= self.model.n_components:
            raise ImmunizationError(
                f"k must be in [0, {self.model.n_components}] (retained components), got {self.k}"
            )
        if self.convention not in CONVENTIONS:
            raise ImmunizationError(f"convention must be one of {CONVENTIONS}")
        if self.model.tenors.shape != self.curve.tenors.shape or not np.allclose(
            self.model.tenors, self.curve.tenors, rtol=0, atol=1e-12
        ):
            raise TenorMismatchError("model and curve tenors differ")

    @property
    def ids(self) -> list[str]:
        return [ins.id for ins in self.instruments]

    def _flow_count(self, stream: CashFlowStream) -> int:
        return len(self.liability) if self.convention == "common" else len(stream)

    def factor_durations(self, stream: CashFlowStream) -> np.ndarray:
        return np.array([
            factor_direction_duration(
                stream, self.curve, self.model.loadings[:, v],
                flow_count=self._flow_count(stream),
            )
            for v in range(self.k)
        ])


def build_constraints(problem: ImmunizationProblem):
    """Return ``(A, b)`` with ``A`` of shape (k+1, M)."""
    k, m = problem.k, len(problem.instruments)
    a = np.empty((k + 1, m))
    a[0] = 1.0
    for j, ins in enumerate(problem.instruments):
        pv = present_value(ins.stream, problem.curve)
        if not pv > 0:
            raise ImmunizationError(f"instrument {ins.id!r} has non-positive PV {pv}")
        a[1:, j] = problem.factor_durations(ins.stream)
    s_l = present_value(problem.liability, problem.curve)
    b = np.empty(k + 1)
    b[0] = s_l
    b[1:] = s_l * problem.factor_durations(problem.liability)
    return a, b


def _full_rank(r: np.ndarray) -> bool:
    d = np.abs(np.diag(r))
    return d.size > 0 and d.min() > 1e-12 * max(d.max(), 1e-300)


def _solve_exact(a, b):
    # A has at least as many rows as columns
    q, r = np.linalg.qr(a)
    if _full_rank(r):
        return solve_triangular(r, q.T @ b)
    return np.linalg.lstsq(a, b, rcond=None)[0]


def _solve_least_norm(a, b):
    # A^T = Q R  =>  x = Q R^{-T} b is the minimum-norm solution of A x = b
    q, r = np.linalg.qr(a.T)
    if _full_rank(r):
        return q @ solve_triangular(r.T, b, lower=True)
    return np.linalg.lstsq(a, b, rcond=None)[0]


@dataclass(frozen=True)
class ImmunizationSolution:
    ids: tuple
    weights: np.ndarray
    constraint_residuals: np.ndarray
    solver_policy: str

    def to_dict(self) -> dict:
        return {
            "weights": [{"id": i, "value": float(w)} for i, w in zip(self.ids, self.weights)],
            "residuals": [float(r) for r in self.constraint_residuals],
            "policy": self.solver_policy,
        }


def solve_immunization(problem: ImmunizationProblem, policy: str = "auto",
                       allow_short: bool = True) -> ImmunizationSolution:
    """Solve the matching conditions.

    ``exact`` handles square and overdetermined systems (QR), rejecting
    any solution whose residual exceeds ``1e-8 * (1 + ||b||_inf)``.
    ``least_norm`` returns the minimum-2-norm solution of an
    underdetermined system.  ``auto`` picks by shape.
    """
    if policy not in POLICIES:
        raise ImmunizationError(f"policy must be one of {POLICIES}, got {policy!r}")
    a, b = build_constraints(problem)
    rows, cols = a.shape
    if policy == "auto":
        policy = "least_norm" if cols > rows else "exact"
    if policy == "exact":
        if cols > rows:
            raise ImmunizationError(
                f"{cols} instruments for {rows} conditions is underdetermined; use least_norm"
            )
        x = _solve_exact(a, b)
    else:
        x = _solve_least_norm(a, b) if cols >= rows else _solve_exact(a, b)

    resid = a @ x - b
    if np.max(np.abs(resid)) > RESIDUAL_TOL * (1.0 + np.max(np.abs(b))):
        raise InfeasibleError(
            f"no portfolio of {cols} instruments meets the {rows} matching conditions "
            f"(max residual {np.max(np.abs(resid)):.6g})",
            resid,
        )
    if not allow_short and np.any(x < 0):
        short = [i for i, w in zip(problem.ids, x) if w < 0]
        raise InfeasibleError(f"solution needs short positions in {short}", resid)
    return ImmunizationSolution(tuple(problem.ids), x, resid, policy)


@dataclass(frozen=True)
class VerificationReport:
    """``mismatch[v, e] = |dS_A - dS_L|`` for a shock ``epsilons[e]`` along component ``v``."""

    epsilons: np.ndarray
    mismatch: np.ndarray
    delta_assets: np.ndarray
    delta_liability: np.ndarray


def verify_immunization(solution: ImmunizationSolution, problem: ImmunizationProblem,
                        epsilons) -> VerificationReport:
    eps = np.asarray(epsilons, dtype=float).ravel()
    curve = problem.curve
    pv0 = np.array([present_value(ins.stream, curve) for ins in problem.instruments])
    units = solution.weights / pv0
    liab0 = present_value(problem.liability, curve)

    da = np.zeros((problem.k, eps.size))
    dl = np.zeros((problem.k, eps.size))
    for v in range(problem.k):
        u = problem.model.loadings[:, v]
        for e, epsilon in enumerate(eps):
            shocked = shift_curve(curve, u, epsilon)
            pv1 = np.array([present_value(ins.stream, shocked) for ins in problem.instruments])
            da[v, e] = units @ (pv1 - pv0)
            dl[v, e] = present_value(problem.liability, shocked) - liab0
    return VerificationReport(eps, np.abs(da - dl), da, dl)


def load_instruments(path) -> list[Instrument]:
    """Read an ``id,time_years,amount`` CSV; rows sharing an id form one instrument."""
    flows: dict[str, list[tuple[float, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["id", "time_years", "amount"]:
        raise CashFlowError(f"{path}: header must be 'id,time_years,amount'")
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 3 or not row[0].strip():
            raise CellParseError(f"{path}: row {i} must be 'id,time_years,amount'", row=i)
        try:
            flow = (float(row[1]), float(row[2]))
        except ValueError:
            raise CellParseError(f"{path}: row {i} has a non-numeric cell: {row}", row=i) from None
        flows.setdefault(row[0].strip(), []).append(flow)
    if not flows:
        raise CashFlowError(f"{path}: no instruments")
    return [Instrument(k, CashFlowStream.from_flows(sorted(v))) for k, v in flows.items()]
