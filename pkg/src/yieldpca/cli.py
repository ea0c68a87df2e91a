"""
Command-line front end.

Exit codes: 0 ok, 2 usage / input validation, 3 numerical failure,
4 infeasible immunization.  With ``--output DIR`` every report file is
staged in full and then renamed into place, so a failing command leaves
no partial output behind.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import curve_store, immunize, pca, pricing, risk

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_INFEASIBLE = 0, 2, 3, 4
FACTOR_NAMES = ("level", "slope", "curvature")
DEFAULT_EPSILONS = "-0.001,-0.0001,0.0001,0.001"
_LIST_FLAGS = ("--pcd", "--epsilon", "--confidence")
_NUMBER_LIST = re.compile(r"^[-+0-9.eE,\s]+$")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.6f}"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _write_outputs(outdir: Path | None, files: dict[str, str]):
    if outdir is None:
        return
    outdir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=outdir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, outdir / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, dest in staged:
        os.replace(tmp, dest)


def _factor_label(v: int) -> str:
    return f"PC{v + 1}" + (f" ({FACTOR_NAMES[v]})" if v < 3 else "")


# ----------------------------------------------------------------------------
# shared helpers

def _mode(args) -> str:
    if args.mode:
        return args.mode
    return "levels" if args.paper_compat else "changes"


def _load_series(args):
    if not args.input:
        raise UsageError("--input is required")
    return curve_store.load_curve_series(args.input, args.unit)


def _model(args, series, k: int):
    if getattr(args, "model", None):
        model = pca.PcaModel.load(args.model)
        if k > model.m:
            raise UsageError(f"--components {k} exceeds the model's {model.m} tenors")
        return model
    return pca.fit_pca(series, _mode(args), k)


def _curve(args, series):
    idx = args.date_index if args.date_index >= 0 else series.shape[0] + args.date_index
    try:
        return curve_store.snapshot(series, idx)
    except IndexError as exc:
        raise UsageError(f"--date-index: {exc}") from None


# ----------------------------------------------------------------------------
# subcommands

def cmd_pca(args) -> int:
    series = _load_series(args)
    k = args.components
    if k > series.shape[1]:
        raise UsageError(f"--components {k} exceeds the {series.shape[1]} tenors in the input")
    model = pca.fit_pca(series, _mode(args), k)

    lines = ["tenor," + ",".join(f"pc{v + 1}" for v in range(k))]
    for t, row in zip(model.tenors, model.loadings):
        lines.append(curve_store.format_tenor(t) + "," + ",".join(fmt(x) for x in row[:k]))

    out = [f"mode: {model.mode}", "Percent of variance explained by principal component"]
    for v in range(k):
        out.append(f"  {_factor_label(v)}: {fmt(model.explained_pct[v])}")
    out.append(f"  first {k} total: {fmt(float(np.sum(model.explained_pct[:k])))}")
    data_rows = pca.model_input(series, model.mode).shape[0]
    if data_rows > k + 1:
        resid = pca.residual_diagnostics(series, model, k)
        sd = np.std(pca.model_input(series, model.mode), axis=0, ddof=1)
        out.append(f"Standard deviations (bp): tenor, SD, residual SD from {k}-factor fit")
        for t, s, r in zip(model.tenors, sd, resid.residual_sd):
            out.append(f"  {curve_store.format_tenor(t)}: {fmt(1e4 * s)} {fmt(1e4 * r)}")

    _write_outputs(args.output, {
        "model.json": _dumps(model.to_dict()),
        "loadings.csv": "\n".join(lines) + "\n",
    })
    print("\n".join(out))
    if args.output is None:
        print(_dumps(model.to_dict()), end="")
    return EXIT_OK


def cmd_var(args) -> int:
    confidences = _float_list(args.confidence, "--confidence")
    if not confidences:
        raise UsageError("--confidence needs at least one level")
    for c in confidences:
        if not 0.5 < c < 1.0:
            raise UsageError(f"--confidence {c} must lie in (0.5, 1)")
    if not args.value > 0:
        raise UsageError("--value must be positive")
    if args.pcd is None and not args.cashflows:
        raise UsageError("var needs either --pcd or --cashflows")
    if args.sigma is not None and args.sigma < 0:
        raise UsageError("--sigma must be non-negative")

    report: dict = {"value": args.value, "paper_compat": args.paper_compat}
    model = None
    if args.pcd is not None:
        pcd = np.array(_float_list(args.pcd, "--pcd"))
        if pcd.size == 0:
            raise UsageError("--pcd needs at least one value")
        k = pcd.size
    else:
        k = args.components
        series = _load_series(args)
        model = _model(args, series, k)
        stream = pricing.load_cash_flows(args.cashflows)
        curve = _curve(args, series)
        krd = risk.krd_vector(stream, curve, "paper_compat" if args.paper_compat else "standard")
        pcd = risk.pc_duration(krd, model, k)
        report["krd"] = krd.tolist()

    if args.paper_compat:
        policy, sigma = "uniform", risk.PAPER_UNIFORM_SIGMA if args.sigma is None else args.sigma
    elif args.sigma is not None:
        policy, sigma = "uniform", args.sigma
    else:
        policy, sigma = "model", risk.PAPER_UNIFORM_SIGMA
        if model is None:
            if not (args.input or args.model):
                raise UsageError("model sigmas need --input or --model (or pass --sigma)")
            series = _load_series(args) if args.input else None
            model = _model(args, series, k)
    if model is not None and k > model.m:
        raise UsageError(f"{k} PCDs but the model has {model.m} components")

    results = []
    out = []
    for c in confidences:
        cfg = risk.VarConfig(args.value, c, policy, sigma, rounded_z=args.paper_compat)
        sigmas = risk.factor_sigmas(cfg, k, model)
        var = risk.pc_var(pcd, cfg, sigmas)
        results.append({"confidence": c, "z": cfg.z, "var": var})
        out.append(f"VaR with {100 * c:g} percent confidence level is: {fmt(var)}")
    report.update({
        "pcd": pcd.tolist(),
        "sigmas": sigmas.tolist(),
        "sigma_policy": cfg.policy_label,
        "results": results,
    })
    _write_outputs(args.output, {"var.json": _dumps(report)})
    out.insert(0, "PCD: " + ", ".join(fmt(x) for x in pcd))
    print("\n".join(out))
    return EXIT_OK


def cmd_immunize(args) -> int:
    if not args.liabilities or not args.instruments:
        raise UsageError("immunize needs --liabilities and --instruments")
    epsilons = _float_list(args.epsilon, "--epsilon")
    series = _load_series(args)
    liability = pricing.load_cash_flows(args.liabilities)
    instruments = immunize.load_instruments(args.instruments)
    k = args.components
    model = _model(args, series, k)
    if model.n_components < k:
        raise UsageError(f"--components {k} exceeds the model's {model.n_components} retained components")
    curve = _curve(args, series)
    problem = immunize.ImmunizationProblem(liability, instruments, curve, model, k, args.convention)
    try:
        sol = immunize.solve_immunization(problem, args.policy, allow_short=not args.long_only)
    except immunize.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.residual is not None:
            print("residuals: " + ", ".join(fmt(r) for r in exc.residual), file=sys.stderr)
        return EXIT_INFEASIBLE
    ver = immunize.verify_immunization(sol, problem, epsilons)

    table = ["factor,epsilon,delta_assets,delta_liability,mismatch"]
    for v in range(k):
        for e, eps in enumerate(ver.epsilons):
            table.append(",".join([
                f"pc{v + 1}", fmt(eps), fmt(ver.delta_assets[v, e]),
                fmt(ver.delta_liability[v, e]), fmt(ver.mismatch[v, e]),
            ]))
    doc = sol.to_dict()
    doc["liability_pv"] = pricing.present_value(liability, curve)
    doc["k"] = k
    doc["convention"] = args.convention
    _write_outputs(args.output, {
        "solution.json": _dumps(doc),
        "verification.csv": "\n".join(table) + "\n",
    })
    out = [f"liability PV: {fmt(doc['liability_pv'])}", f"policy: {sol.solver_policy}"]
    out += [f"  {i}: {fmt(w)}" for i, w in zip(sol.ids, sol.weights)]
    out.append("max |residual|: " + fmt(float(np.max(np.abs(sol.constraint_residuals)))))
    print("\n".join(out))
    return EXIT_OK


def cmd_durations(args) -> int:
    if not args.cashflows:
        raise UsageError("durations needs --cashflows")
    series = _load_series(args)
    stream = pricing.load_cash_flows(args.cashflows)
    curve = _curve(args, series)
    k = args.components
    if args.uniform_loadings:
        loadings = np.full((len(curve), k), 1.0 / np.sqrt(len(stream)))
    else:
        loadings = _model(args, series, k).loadings
        if k > loadings.shape[1]:
            raise UsageError(f"--components {k} exceeds the model's components")
    rep = risk.duration_report(stream, curve, loadings, k, args.flat_yield)
    _write_outputs(args.output, {"durations.json": _dumps(rep.to_dict())})
    out = [
        f"flat yield: {fmt(rep.flat_yield)}",
        f"macaulay: {fmt(rep.macaulay)}",
        f"fisher_weil: {fmt(rep.fisher_weil)}",
    ]
    out += [f"{_factor_label(v)}: {fmt(d)}" for v, d in enumerate(rep.factor_durations)]
    print("\n".join(out))
    return EXIT_OK


# ----------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {k}")
    return k


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", help="curve CSV: date,<tenor years>,...")
    shared.add_argument("--unit", choices=("percent", "decimal"), default="decimal")
    shared.add_argument("--mode", choices=pca.MODES, default=None,
                        help="fit PCA to rate changes (default) or levels")
    shared.add_argument("--components", type=_positive_int, default=3, metavar="K")
    shared.add_argument("--output", type=Path, default=None, metavar="DIR")
    shared.add_argument("--paper-compat", action="store_true",
                        help="price-move KRD, uniform sigma 0.1, rounded z, levels PCA")
    shared.add_argument("--model", help="fitted model JSON (skips fitting)")
    shared.add_argument("--date-index", type=int, default=-1,
                        help="curve date used for pricing (default: last)")

    parser = argparse.ArgumentParser(prog="yieldpca", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("pca", parents=[shared], help="fit principal components")

    p = sub.add_parser("var", parents=[shared], help="principal-component VaR")
    p.add_argument("--value", type=float, default=1000.0, help="initial portfolio value V0")
    p.add_argument("--confidence", default="0.95,0.99")
    p.add_argument("--pcd", default=None, help="explicit PCD vector, comma-separated")
    p.add_argument("--cashflows", help="portfolio cash-flow CSV: time_years,amount")
    p.add_argument("--sigma", type=float, default=None, help="uniform factor sigma")

    p = sub.add_parser("immunize", parents=[shared], help="multi-factor immunization")
    p.add_argument("--liabilities")
    p.add_argument("--instruments")
    p.add_argument("--epsilon", default=DEFAULT_EPSILONS)
    p.add_argument("--policy", choices=immunize.POLICIES, default="auto")
    p.add_argument("--convention", choices=immunize.CONVENTIONS, default="common")
    p.add_argument("--long-only", action="store_true", help="reject short positions")

    p = sub.add_parser("durations", parents=[shared], help="duration report")
    p.add_argument("--cashflows")
    p.add_argument("--flat-yield", type=float, default=None)
    p.add_argument("--uniform-loadings", action="store_true",
                   help="use constant 1/sqrt(N) loadings instead of a fitted model")
    return parser


def _join_list_flags(argv: list[str]) -> list[str]:
    # "--pcd -0.7,-1.2" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _LIST_FLAGS and i + 1 < len(argv) and _NUMBER_LIST.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


COMMANDS = {"pca": cmd_pca, "var": cmd_var, "immunize": cmd_immunize, "durations": cmd_durations}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_list_flags(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except immunize.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (pca.DegenerateCovarianceError, pca.JacobiConvergenceError, risk.RiskError,
            ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
