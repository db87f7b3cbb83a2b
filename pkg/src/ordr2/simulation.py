"""Monte-Carlo engine for comparing categorical R² measures with latent OLS R².

Each replication draws a continuous latent response, fits OLS to it, then
discretizes it at empirical quantiles into r categories and fits a
cumulative model with the same covariates (optionally padded with pure
noise columns). Every random stream is derived from the master seed and
the cell coordinates (setting, n, sigma, replication), so a replication's
data does not depend on which other cells are in the grid, on r, or on
the number of worker processes.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import gof
from .errors import ConvergenceError, DegenerateDiscretizationError, Ordr2Error
from .estimation import CONTINUOUS, ORDINAL, Dataset, fit_clm, fit_ols
from .gof import PenaltySpec
from .links import LinkKind

log = logging.getLogger(__name__)

ROW_HEADER = ("setting", "n", "sigma", "r", "rep", "measure", "value", "flag")
AGG_HEADER = ("setting", "n", "sigma", "r", "measure", "mean", "sd", "count")

DEFAULT_REPLICATIONS = 200
FULL_REPLICATIONS = 1000
FULL_N_GRID = (100, 500, 1000)
FULL_SIGMA_GRID = (1.0, 2.0, 3.0, 4.0)


class Setting(str, enum.Enum):
    SINGLE = "a"
    MIXED = "b"

    @classmethod
    def parse(cls, value) -> "Setting":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        aliases = {"single": "a", "singledistribution": "a", "mixed": "b", "mixeddistribution": "b"}
        return cls(aliases.get(v, v))

    @property
    def beta(self) -> np.ndarray:
        """True latent coefficients, intercept first."""
        if self is Setting.SINGLE:
            return np.array([0.0, 1.0, 2.0])
        return np.array([0.0, -1 / 3, -2 / 3, -1.0, 1.0, 2.0])


@dataclass(frozen=True)
class SimConfig:
    setting: Setting = Setting.SINGLE
    n_grid: tuple[int, ...] = (1000,)
    sigma_grid: tuple[float, ...] = (1.0,)
    r_grid: tuple[int, ...] = (2,)
    replications: int = DEFAULT_REPLICATIONS
    noise_covariates: int = 0
    link: LinkKind = LinkKind.PROBIT
    penalty_list: tuple[PenaltySpec, ...] = gof.CANDIDATES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "setting", Setting.parse(self.setting))
        object.__setattr__(self, "link", LinkKind.parse(self.link))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "r_grid", tuple(int(r) for r in self.r_grid))
        object.__setattr__(self, "penalty_list", tuple(
            PenaltySpec.parse(p) if isinstance(p, str) else p for p in self.penalty_list))
        if not self.n_grid or min(self.n_grid) < 2:
            raise ValueError("sample sizes must be >= 2")
        if not self.sigma_grid or not all(s > 0 and math.isfinite(s) for s in self.sigma_grid):
            raise ValueError("sigma values must be positive")
        if not self.r_grid or min(self.r_grid) < 2:
            raise ValueError("category counts must be >= 2")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if self.noise_covariates < 0:
            raise ValueError("noise_covariates must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def n_predictors(self) -> int:
        return len(self.setting.beta) - 1


@dataclass(frozen=True)
class SimResultRow:
    setting: str
    n: int
    sigma: float
    r: int
    rep: int
    measure: str
    value: float
    flag: str = ""

    def as_tuple(self):
        return (self.setting, self.n, self.sigma, self.r, self.rep, self.measure, self.value, self.flag)


# ---------------------------------------------------------------------------
# random streams


def _sigma_key(sigma: float) -> int:
    return zlib.crc32(repr(float(sigma)).encode())


def replication_streams(seed: int, setting: Setting | str, n: int, sigma: float, rep: int):
    """(latent, noise) generators for one replication cell.

    Keys are the cell coordinates, never a running counter, so streams are
    stable under changes to the rest of the grid.
    """
    setting = Setting.parse(setting)
    key = (ord(setting.value), int(n), _sigma_key(sigma), int(rep))
    root = np.random.SeedSequence(int(seed), spawn_key=key)
    latent, noise = root.spawn(2)
    return np.random.default_rng(latent), np.random.default_rng(noise)


# ---------------------------------------------------------------------------
# data generation


def gen_latent(setting: Setting | str, n: int, sigma: float, rng: np.random.Generator) -> Dataset:
    """Covariates x1..xk and latent response x'beta + N(0, sigma)."""
    setting = Setting.parse(setting)
    if n < 2:
        raise ValueError("n must be at least 2")
    if setting is Setting.SINGLE:
        X = rng.uniform(0.0, 1.0, size=(n, 2))
    else:
        X = np.column_stack([rng.standard_normal(size=(n, 3)), rng.uniform(0.0, 1.0, size=(n, 2))])
    beta = setting.beta
    eps = rng.standard_normal(n) * sigma
    y = beta[0] + X @ beta[1:] + eps
    names = tuple(f"x{j + 1}" for j in range(X.shape[1]))
    return Dataset(names, X, y, CONTINUOUS)


def add_noise_covariates(data: Dataset, k: int, rng: np.random.Generator) -> Dataset:
    if k == 0:
        return data
    noise = rng.uniform(0.0, 1.0, size=(data.n, k))
    names = data.names + tuple(f"noise{j + 1}" for j in range(k))
    return Dataset(names, np.column_stack([data.X, noise]), data.y, data.kind, dict(data.meta))


def empirical_quantiles(values, probs) -> np.ndarray:
    """Linear interpolation between order statistics (R's type 7)."""
    return np.quantile(np.asarray(values, dtype=float), probs, method="linear")


def discretize(y_tilde, r: int) -> np.ndarray:
    """Equal-probability bins at empirical quantiles j/r; ties go to the lower bin."""
    y = np.asarray(y_tilde, dtype=float)
    if r < 2:
        raise ValueError("r must be at least 2")
    if len(y) < r:
        raise DegenerateDiscretizationError(f"cannot form {r} categories from {len(y)} values")
    cuts = empirical_quantiles(y, np.arange(1, r) / r)
    codes = np.searchsorted(cuts, y, side="left") + 1
    counts = np.bincount(codes, minlength=r + 1)[1:]
    if np.any(counts == 0):
        raise DegenerateDiscretizationError(f"empty categories after discretization: counts {counts.tolist()}")
    return codes


# ---------------------------------------------------------------------------
# replications


def _measure_ids(config: SimConfig, r: int) -> list[str]:
    ids = ["mf", "cs", "nk", "mz"]
    ids += [p.measure_id for p in config.penalty_list]
    if r == 2:
        ids.append("tj")
    return ids


def run_replication(config: SimConfig, n: int, sigma: float, r: int | Sequence[int], rep: int) -> list[SimResultRow]:
    """All measure rows for one replication, for one or several r values.

    The latent data (and thus the ``ols`` row) is shared by every r.
    """
    r_values = [int(r)] if np.isscalar(r) else [int(v) for v in r]
    latent_rng, noise_rng = replication_streams(config.seed, config.setting, n, sigma, rep)
    latent = gen_latent(config.setting, n, sigma, latent_rng)
    ols = fit_ols(latent).r2_ols
    fit_base = add_noise_covariates(latent, config.noise_covariates, noise_rng)
    s = config.setting.value
    rows: list[SimResultRow] = []
    for rv in r_values:
        rows.append(SimResultRow(s, n, sigma, rv, rep, "ols", ols))
        ids = _measure_ids(config, rv)
        flag = ""
        try:
            codes = discretize(latent.y, rv)
            model = fit_clm(fit_base.with_response(codes, ORDINAL), config.link)
            if model.separated:
                flag = "separation"
        except ConvergenceError as exc:
            model, flag = exc.model, "nonconverged"
        except Ordr2Error as exc:
            log.warning("replication %s/%s/%s/%s r=%s failed: %s", s, n, sigma, rep, rv, exc)
            for m in ids:
                rows.append(SimResultRow(s, n, sigma, rv, rep, m, float("nan"), "failed"))
                rows.append(SimResultRow(s, n, sigma, rv, rep, f"delta:{m}", float("nan"), "failed"))
            continue
        p1 = model.fitted_probs[:, 1] if rv == 2 else None
        report = gof.report_from_logliks(
            model.loglik, model.null_loglik, model.n, rv, config.penalty_list,
            linear_predictors=model.linear_predictors, link=model.link,
            fitted_p1=p1, response=model.response)
        for m in ids:
            value = report.measures.get(m, float("nan"))
            mflag = flag or ("undefined" if m not in report.measures else "")
            rows.append(SimResultRow(s, n, sigma, rv, rep, m, value, mflag))
            rows.append(SimResultRow(s, n, sigma, rv, rep, f"delta:{m}", value - ols, mflag))
    return rows


def _cell_task(args):
    config, n, sigma, rep = args
    return (n, sigma, rep), run_replication(config, n, sigma, config.r_grid, rep)


@dataclass
class ExperimentResult:
    config: SimConfig
    rows: list[SimResultRow]
    aggregate: list[tuple]
    nonconvergence: dict[tuple, float] = field(default_factory=dict)

    def mean(self, measure: str, *, n: int | None = None, sigma: float | None = None, r: int | None = None) -> float:
        hits = [a for a in self.aggregate
                if a[4] == measure and (n is None or a[1] == n)
                and (sigma is None or a[2] == float(sigma)) and (r is None or a[3] == r)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} aggregate rows match {measure}, n={n}, sigma={sigma}, r={r}")
        return hits[0][5]

    def rows_csv(self) -> str:
        return rows_to_csv(self.rows)

    def aggregate_csv(self) -> str:
        return aggregate_to_csv(self.aggregate)


def aggregate(rows: Iterable[SimResultRow]) -> list[tuple]:
    """Mean, sd (n - 1 denominator, 0 for a single value) and count per cell and measure.

    Flagged rows (non-converged, failed, undefined) are excluded.
    """
    groups: dict[tuple, list[tuple[int, float]]] = {}
    for row in rows:
        key = (row.setting, row.n, row.sigma, row.r, row.measure)
        bucket = groups.setdefault(key, [])
        if not row.flag and math.isfinite(row.value):
            bucket.append((row.rep, row.value))
    out = []
    for key in sorted(groups, key=_agg_sort_key):
        vals = np.array([v for _, v in sorted(groups[key])])
        if len(vals) == 0:
            out.append((*key, float("nan"), float("nan"), 0))
            continue
        sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
        out.append((*key, float(np.mean(vals)), sd, len(vals)))
    return out


def _agg_sort_key(key):
    setting, n, sigma, r, measure = key
    return (setting, n, sigma, r, measure.startswith("delta:"), measure)


def run_experiment(config: SimConfig, workers: int = 1) -> ExperimentResult:
    """Run every (n, sigma, replication) cell and aggregate.

    Output is identical for any ``workers`` value: cells are keyed by their
    coordinates and sorted before aggregation.
    """
    tasks = [(config, n, sigma, rep)
             for n in config.n_grid for sigma in config.sigma_grid for rep in range(config.replications)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_cell_task(t) for t in tasks]
    results.sort(key=lambda kv: kv[0])
    rows = [row for _, cell in results for row in sorted(cell, key=_row_sort_key)]
    rows.sort(key=_row_sort_key)
    agg = aggregate(rows)

    nonconv: dict[tuple, float] = {}
    for n in config.n_grid:
        for sigma in config.sigma_grid:
            for r in config.r_grid:
                sel = [row for row in rows if row.n == n and row.sigma == sigma and row.r == r and row.measure == "mf"]
                bad = sum(1 for row in sel if row.flag in ("nonconverged", "failed"))
                nonconv[(n, sigma, r)] = bad / len(sel) if sel else 0.0
    return ExperimentResult(config, rows, agg, nonconv)


def _row_sort_key(row: SimResultRow):
    return (row.setting, row.n, row.sigma, row.r, row.rep, row.measure.startswith("delta:"), row.measure)


def with_full_scale(config: SimConfig) -> SimConfig:
    """Full grid: n in {100, 500, 1000}, sigma in {1..4}, 1000 replications."""
    return replace(config, n_grid=FULL_N_GRID, sigma_grid=FULL_SIGMA_GRID, replications=FULL_REPLICATIONS)


# ---------------------------------------------------------------------------
# CSV emission


def fmt_float(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(float(x), ".17g")


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def rows_to_csv(rows: Iterable[SimResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_HEADER)
    for row in rows:
        w.writerow([_fmt_cell(v) for v in row.as_tuple()])
    return buf.getvalue()


def aggregate_to_csv(agg: Iterable[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGG_HEADER)
    for rec in agg:
        w.writerow([_fmt_cell(v) for v in rec])
    return buf.getvalue()


def penalty_table(r_max: int, penalties: Sequence[PenaltySpec] = gof.CANDIDATES) -> list[tuple[str, int, float]]:
    """(penalty_id, r, value) for r = 2..r_max, for plotting the penalty curves."""
    if r_max < 2:
        raise ValueError("r_max must be >= 2")
    return [(spec.kind.value if spec.kind is not gof.PenaltyKind.CONSTANT else spec.measure_id[3:], r, gof.penalty(spec, r))
            for spec in penalties for r in range(2, r_max + 1)]
