"""Command-line interface: ``ordr2 {fit,gof,simulate,penalty-table,preprocess-sensory}``.

Exit codes: 0 success, 1 usage or input error, 2 convergence problem (the
summary is still written).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import gof, simulation
from .errors import ConvergenceError, Ordr2Error
from .estimation import fit_binary, fit_clm, fit_ols, loglik_grad_hess
from .gof import PenaltySpec
from .io import (
    SensoryPipelineSpec,
    dumps,
    linear_summary,
    load_csv,
    load_summary,
    model_summary,
    preprocess_sensory,
    save_csv,
)
from .links import LinkKind, sf

log = logging.getLogger("ordr2")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
SEED_ENV = "ORDR2_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _penalties(text: str) -> tuple[PenaltySpec, ...]:
    try:
        return tuple(PenaltySpec.parse(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> tuple[int, ...]:
    """``"2..10"`` or ``"100,500"``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return tuple(out)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def cmd_fit(args) -> int:
    columns = args.columns.split(",") if args.columns else None
    data = load_csv(args.data, args.response, args.kind, columns)
    if args.kind == "linear":
        fit = fit_ols(data)
        _write(dumps(linear_summary(fit, args.response, data.n)), args.out)
        return EXIT_OK
    link = LinkKind.parse(args.link)
    fitter = fit_binary if args.kind == "binary" else fit_clm
    status = EXIT_OK
    try:
        model = fitter(data, link)
    except ConvergenceError as exc:
        log.error("%s", exc)
        model, status = exc.model, EXIT_NUMERIC
    if model.separated:
        log.warning("coefficients diverge (possible separation); measures use the last iterate")
        status = EXIT_NUMERIC
    report = gof.report_from_logliks(
        model.loglik, model.null_loglik, model.n, model.r, args.penalties,
        linear_predictors=model.linear_predictors, link=model.link,
        fitted_p1=model.fitted_probs[:, 1] if model.r == 2 else None, response=model.response)
    _write(dumps(model_summary(model, report, args.kind, args.response)), args.out)
    return status


def cmd_gof(args) -> int:
    summary = load_summary(args.model)
    if summary["kind"] == "linear":
        raise UsageError("gof needs a binary or ordinal model summary")
    n, r = summary["n"], summary["r"]
    link = LinkKind.parse(summary["link"])
    ll, ll0 = summary["loglik"], summary["null_loglik"]
    eta = p1 = y = None
    if args.data:
        kind = "binary" if r == 2 else "ordinal"
        data = load_csv(args.data, args.response or summary["response"], kind, summary["predictors"])
        if data.n != n:
            raise UsageError(f"data has {data.n} rows but the model was fitted on {n}")
        beta = np.array([summary["coefficients"][c] for c in summary["predictors"]])
        tau = np.array(summary["thresholds"])
        check = loglik_grad_hess(beta, tau, data.X, data.y, link, hessian=False)[0]
        if abs(check - ll) > 1e-6 * max(1.0, abs(ll)):
            log.warning("log-likelihood recomputed from data (%.10g) differs from summary (%.10g)", check, ll)
        eta = data.X @ beta
        y = data.y
        if r == 2:
            p1 = np.asarray(sf(link, tau[0] - eta))
    report = gof.report_from_logliks(ll, ll0, n, r, args.penalties, linear_predictors=eta,
                                     link=link if eta is not None else None, fitted_p1=p1, response=y)
    _write(dumps(report.to_dict()), args.out)
    return EXIT_OK


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def cmd_simulate(args) -> int:
    reps = args.reps
    if reps is None:
        reps = simulation.FULL_REPLICATIONS if args.full_scale else simulation.DEFAULT_REPLICATIONS
    try:
        config = simulation.SimConfig(
            setting=args.setting, n_grid=args.n, sigma_grid=args.sigma, r_grid=args.r,
            replications=reps, noise_covariates=args.noise, link=args.link,
            penalty_list=args.penalties, seed=_seed(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    log.info("simulating setting %s with seed %d", config.setting.value, config.seed)
    result = simulation.run_experiment(config, workers=args.workers)
    _write(result.rows_csv(), args.out_rows)
    _write(result.aggregate_csv(), args.out_agg)
    worst = max(result.nonconvergence.values(), default=0.0)
    if worst > 0:
        log.warning("non-converged replications in some cells (max rate %.3f)", worst)
    return EXIT_OK


def cmd_penalty_table(args) -> int:
    if args.r_max < 2:
        raise UsageError("--r-max must be at least 2")
    rows = simulation.penalty_table(args.r_max)
    lines = ["penalty_id,r,value"] + [f"{pid},{r},{simulation.fmt_float(v)}" for pid, r, v in rows]
    _write("\n".join(lines), args.out)
    return EXIT_OK


def cmd_preprocess_sensory(args) -> int:
    spec = SensoryPipelineSpec(args.androstenone, args.skatole, args.rating, args.cutpoint)
    raw = load_csv(args.data, spec.rating_column, "linear",
                   [spec.androstenone_column, spec.skatole_column])
    out = preprocess_sensory(raw, spec)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    save_csv(out.binary, outdir / "binary.csv", "tainted", marker=True)
    save_csv(out.ordinal, outdir / "ordinal.csv", "rating_class", marker=True)
    save_csv(out.linear, outdir / "linear.csv", "rating", marker=True)
    sys.stderr.write(
        f"kept {out.linear.n} rows; excluded {out.excluded['androstenone_zero']} with zero androstenone, "
        f"{out.excluded['skatole_zero']} with zero skatole\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ordr2", description="Pseudo-R² for binary and ordinal regression models.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    all_penalties = ",".join(f"l{k}" for k in range(1, 7))

    p = sub.add_parser("fit", help="fit a model and report fit measures as JSON")
    p.add_argument("--data", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--kind", choices=("binary", "ordinal", "linear"), default="ordinal")
    p.add_argument("--link", choices=("probit", "logit"), default="probit")
    p.add_argument("--penalties", type=_penalties, default=_penalties(all_penalties))
    p.add_argument("--columns", help="comma-separated predictors (default: all but the response)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="recompute fit measures from a saved model summary")
    p.add_argument("--model", required=True)
    p.add_argument("--data", help="training data, needed for mz and tj")
    p.add_argument("--response")
    p.add_argument("--penalties", type=_penalties, default=_penalties(all_penalties))
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("simulate", help="Monte-Carlo comparison against the latent OLS R²")
    p.add_argument("--setting", choices=("a", "b"), default="a")
    p.add_argument("--n", type=_int_list, default=(1000,))
    p.add_argument("--sigma", type=_float_list, default=(1.0,))
    p.add_argument("--r", type=_int_list, default=(2,))
    p.add_argument("--reps", type=int)
    p.add_argument("--full-scale", action="store_true", help="1000 replications instead of 200")
    p.add_argument("--noise", type=int, default=0, help="extra pure-noise U(0,1) covariates in the fitted model")
    p.add_argument("--link", choices=("probit", "logit"), default="probit")
    p.add_argument("--penalties", type=_penalties, default=_penalties(all_penalties + ",const:3"))
    p.add_argument("--seed", type=int, help=f"master seed (falls back to ${SEED_ENV}, then 0)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-rows", required=True)
    p.add_argument("--out-agg", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("penalty-table", help="penalty function values for r = 2..r-max")
    p.add_argument("--r-max", type=int, default=10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_penalty_table)

    p = sub.add_parser("preprocess-sensory", help="build binary/ordinal/linear datasets from raw sensory data")
    p.add_argument("--data", required=True)
    p.add_argument("--rating", default="rating")
    p.add_argument("--androstenone", default="androstenone")
    p.add_argument("--skatole", default="skatole")
    p.add_argument("--cutpoint", type=float, default=2.0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_preprocess_sensory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, Ordr2Error, ValueError, OSError) as exc:
        sys.stderr.write(f"ordr2 {args.command}: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
