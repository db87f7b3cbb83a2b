"""CSV/JSON reading and writing, and the boar-taint sensory preprocessing."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError, ParseError, SchemaError
from .estimation import CONTINUOUS, ORDINAL, Dataset, FittedModel, LinearFit
from .gof import GofReport

log = logging.getLogger(__name__)

PREPROCESSED_MARKER = "_ordr2_preprocessed"
FIT_SCHEMA_ID = "ordr2.fit/1"

RESPONSE_KINDS = {"binary": ORDINAL, "ordinal": ORDINAL, "linear": CONTINUOUS, "continuous": CONTINUOUS}


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric cell {text!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite cell {text!r}", row=row, column=column)
    return value


def load_csv(path, response_column: str, response_kind: str = "ordinal",
             columns: Sequence[str] | None = None) -> Dataset:
    """Read a headed numeric CSV into a :class:`Dataset`.

    Row numbers in errors count data rows from 1 (the header is row 0).
    All columns other than the response become covariates in file order,
    unless ``columns`` selects a subset. The preprocessing marker column is
    consumed into ``meta`` and never used as a covariate.
    """
    kind = response_kind.lower()
    if kind not in RESPONSE_KINDS:
        raise DataError(f"unknown response kind {response_kind!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        records = [rec for rec in reader if any(cell.strip() for cell in rec)]
    if response_column not in header:
        raise ParseError(f"response column {response_column!r} not found; have {header}")
    if not records:
        raise ParseError(f"{path} has a header but no data rows")
    missing = [c for c in (columns or ()) if c not in header]
    if missing:
        raise SchemaError(f"columns not found: {', '.join(missing)}")

    meta = {"source": str(path), "response_name": response_column, "response_kind": kind}
    if PREPROCESSED_MARKER in header:
        meta["preprocessed"] = True
    names = list(columns) if columns else [h for h in header if h not in (response_column, PREPROCESSED_MARKER)]
    used = [header.index(c) for c in (*names, response_column)]
    data = np.empty((len(records), len(used)))
    for i, rec in enumerate(records, start=1):
        if len(rec) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(rec)}", row=i)
        for k, j in enumerate(used):
            data[i - 1, k] = _parse_float(rec[j].strip(), i, header[j])
    X = data[:, :-1]
    y = data[:, -1]
    if RESPONSE_KINDS[kind] == ORDINAL:
        bad = np.flatnonzero((y != np.round(y)) | (y < 1))
        if len(bad):
            raise ParseError(f"ordinal codes must be integers >= 1, got {y[bad[0]]!r}",
                             row=int(bad[0]) + 1, column=response_column)
        if kind == "binary" and y.max() > 2:
            raise ParseError("binary response must use codes 1 and 2", column=response_column)
    return Dataset(tuple(names), X, y, RESPONSE_KINDS[kind], meta)


def save_csv(data: Dataset, path, response_column: str = "y", *, marker: bool = False) -> None:
    """Write a dataset with 17 significant digits so it reloads bit-for-bit."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.names, response_column, *([PREPROCESSED_MARKER] if marker else [])])
        for i in range(data.n):
            yv = data.y[i]
            ycell = str(int(yv)) if data.kind == ORDINAL else format(float(yv), ".17g")
            w.writerow([*(format(float(v), ".17g") for v in data.X[i]), ycell, *(["1"] if marker else [])])


# ---------------------------------------------------------------------------
# sensory data


@dataclass(frozen=True)
class SensoryPipelineSpec:
    androstenone_column: str = "androstenone"
    skatole_column: str = "skatole"
    rating_column: str = "rating"
    dichotomy_cutpoint: float = 2.0
    ordinal_bins: tuple[tuple[float, float], ...] = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5))

    def __post_init__(self):
        bins = tuple((float(a), float(b)) for a, b in self.ordinal_bins)
        if not bins:
            raise ValueError("need at least one bin")
        for (a, b), (c, _) in zip(bins, bins[1:]):
            if b != c:
                raise ValueError("bins must be contiguous and ordered")
        if any(a >= b for a, b in bins):
            raise ValueError("each bin needs lower < upper")
        object.__setattr__(self, "ordinal_bins", bins)

    @property
    def rating_range(self) -> tuple[float, float]:
        return self.ordinal_bins[0][0], self.ordinal_bins[-1][1]

    def bin_codes(self, rating) -> np.ndarray:
        """1-based bin index; bins are [a, b) except the last, which is closed."""
        rating = np.asarray(rating, dtype=float)
        lo, hi = self.rating_range
        if np.any((rating < lo) | (rating > hi)):
            raise DataError(f"ratings must lie in [{lo:g}, {hi:g}]")
        edges = np.array([b for _, b in self.ordinal_bins[:-1]])
        return np.searchsorted(edges, rating, side="right") + 1


class SensoryData(NamedTuple):
    binary: Dataset
    ordinal: Dataset
    linear: Dataset
    excluded: dict


def _standardize(x: np.ndarray) -> np.ndarray:
    return (x - x.mean()) / x.std(ddof=1)


def preprocess_sensory(raw: Dataset, spec: SensoryPipelineSpec = SensoryPipelineSpec()) -> SensoryData:
    """Build the binary, ordinal and linear datasets for the boar-taint models.

    ``raw`` holds the average panel rating as its continuous response and
    the androstenone and skatole contents as columns. Rows with a zero
    compound level are dropped (log undefined); the logs are standardized
    with the n - 1 sd after exclusion and their product is appended.
    """
    if raw.meta.get("preprocessed"):
        raise DataError("input is already preprocessed; refusing to standardize twice")
    if raw.kind != CONTINUOUS:
        raise DataError("raw sensory data needs the average rating as a continuous response")
    for col in (spec.androstenone_column, spec.skatole_column):
        if col not in raw.names:
            raise SchemaError(f"column {col!r} not in data (have {list(raw.names)})")
    an = raw.column(spec.androstenone_column)
    sk = raw.column(spec.skatole_column)
    rating = raw.y
    if np.any(an < 0) or np.any(sk < 0):
        raise DataError("compound levels must be nonnegative")
    lo, hi = spec.rating_range
    if np.any((rating < lo) | (rating > hi)):
        raise DataError(f"ratings must lie in [{lo:g}, {hi:g}]")

    zero_an = an == 0
    zero_sk = (sk == 0) & ~zero_an
    keep = ~(zero_an | zero_sk)
    excluded = {"androstenone_zero": int(zero_an.sum()), "skatole_zero": int(zero_sk.sum())}
    if excluded["androstenone_zero"]:
        log.info("excluded %d rows with zero androstenone", excluded["androstenone_zero"])
    if excluded["skatole_zero"]:
        log.warning("excluded %d rows with zero skatole", excluded["skatole_zero"])
    if keep.sum() < 2:
        raise DataError("fewer than two rows remain after exclusions")

    AN = _standardize(np.log(an[keep]))
    SK = _standardize(np.log(sk[keep]))
    X = np.column_stack([AN, SK, AN * SK])
    names = ("AN", "SK", "AN:SK")
    r = rating[keep]
    meta = {"preprocessed": True, "excluded": excluded}
    binary = Dataset(names, X, np.where(r >= spec.dichotomy_cutpoint, 2, 1), ORDINAL, dict(meta))
    ordinal = Dataset(names, X, spec.bin_codes(r), ORDINAL, dict(meta))
    linear = Dataset(names, X, r, CONTINUOUS, dict(meta))
    return SensoryData(binary, ordinal, linear, excluded)


# ---------------------------------------------------------------------------
# JSON summaries


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    # float repr is the shortest string that round-trips (at most 17 significant digits)
    return json.dumps(_clean(obj), indent=2, allow_nan=False)


def model_summary(model: FittedModel, report: GofReport | None, kind: str, response: str) -> dict:
    se = model.std_errors()
    p = len(model.beta)
    out = {
        "schema": FIT_SCHEMA_ID,
        "kind": kind,
        "link": model.link.value,
        "response": response,
        "n": model.n,
        "r": model.r,
        "predictors": list(model.names),
        "coefficients": model.coefficients,
        "std_errors": dict(zip(model.names, se[:p])) if se is not None else None,
        "thresholds": list(model.tau),
        "loglik": model.loglik,
        "null_loglik": model.null_loglik,
        "convergence": {
            "converged": model.converged,
            "iterations": model.iterations,
            "gradient_norm": model.gradient_norm,
            "warnings": list(model.warnings),
        },
        "gof": report.to_dict() if report is not None else None,
    }
    if model.r == 2:
        out["intercept"] = model.intercept
    return out


def linear_summary(fit: LinearFit, response: str, n: int) -> dict:
    return {
        "schema": FIT_SCHEMA_ID,
        "kind": "linear",
        "link": None,
        "response": response,
        "n": n,
        "r": None,
        "predictors": list(fit.names),
        "coefficients": fit.coefficients,
        "std_errors": None,
        "intercept": fit.intercept,
        "thresholds": [],
        "loglik": None,
        "null_loglik": None,
        "convergence": {"converged": True, "iterations": 0, "gradient_norm": 0.0, "warnings": []},
        "residual_ss": fit.residual_ss,
        "total_ss": fit.total_ss,
        "r2_ols": fit.r2_ols,
        "gof": {"measures": {"ols": fit.r2_ols}, "missing": {}, "flags": {}},
    }


def schema_path() -> Path:
    return Path(__file__).with_name("fit_summary.schema.json")


def load_summary(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        summary = json.load(fh)
    if summary.get("schema") != FIT_SCHEMA_ID:
        raise SchemaError(f"{path} is not a model summary ({FIT_SCHEMA_ID})")
    return summary
