"""Pseudo-R² measures for binary and ordinal models.

The penalized likelihood ratio index ``1 - gamma**lambda(r)`` is computed
from ``gamma = loglik_full / loglik_null``; ``lambda`` is one of the six
increasing penalty functions (all equal to 2 at r = 2), the constant 1
(which recovers McFadden's index) or a user constant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import links
from .errors import InapplicableMeasureError, UndefinedMeasureError
from .links import LinkKind

SLACK = 1e-12


class PenaltyKind(str, enum.Enum):
    L0 = "l0"
    L1 = "l1"
    L2 = "l2"
    L3 = "l3"
    L4 = "l4"
    L5 = "l5"
    L6 = "l6"
    CONSTANT = "const"


@dataclass(frozen=True)
class PenaltySpec:
    kind: PenaltyKind
    constant_value: float | None = None

    def __post_init__(self):
        kind = PenaltyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PenaltyKind.CONSTANT:
            if self.constant_value is None or not self.constant_value > 0 or not math.isfinite(self.constant_value):
                raise ValueError("constant penalty needs a positive finite value")
        elif self.constant_value is not None:
            raise ValueError("only constant penalties carry a value")

    @classmethod
    def constant(cls, value: float) -> "PenaltySpec":
        return cls(PenaltyKind.CONSTANT, float(value))

    @classmethod
    def parse(cls, text: str) -> "PenaltySpec":
        """Parse ``l0``..``l6``, ``const:<v>`` or a full id like ``ug:l2``."""
        t = text.strip().lower()
        if t.startswith("ug:"):
            t = t[3:]
        if t.startswith("const:"):
            return cls.constant(float(t.split(":", 1)[1]))
        return cls(PenaltyKind(t))

    @property
    def measure_id(self) -> str:
        if self.kind is PenaltyKind.CONSTANT:
            return f"ug:const:{self.constant_value:g}"
        return f"ug:{self.kind.value}"

    def __call__(self, r: int) -> float:
        return penalty(self, r)


CANDIDATES = tuple(PenaltySpec(PenaltyKind(f"l{k}")) for k in range(1, 7))
L0 = PenaltySpec(PenaltyKind.L0)


def penalty(spec: PenaltySpec | str, r: int) -> float:
    if isinstance(spec, str):
        spec = PenaltySpec.parse(spec)
    if r < 2 or int(r) != r:
        raise ValueError(f"penalty needs an integer category count >= 2, got {r}")
    k = spec.kind
    if k is PenaltyKind.L0:
        return 1.0
    if k is PenaltyKind.L1:
        return float(r)
    if k is PenaltyKind.L2:
        return math.sqrt(2 * r)
    if k is PenaltyKind.L3:
        return 2.0 + math.sqrt(r - 2)
    if k is PenaltyKind.L4:
        return 1.0 + math.log2(r)
    if k is PenaltyKind.L5:
        return 2.0 + math.log2(r - 1)
    if k is PenaltyKind.L6:
        return 2.0 + (r - 2) ** 1.5
    return float(spec.constant_value)


# ---------------------------------------------------------------------------
# likelihood-based measures


def _check_logliks(loglik_full: float, loglik_null: float) -> None:
    if not (math.isfinite(loglik_full) and math.isfinite(loglik_null)):
        raise UndefinedMeasureError("log-likelihoods must be finite")
    if loglik_null >= 0:
        raise UndefinedMeasureError("null log-likelihood is zero (single-category response)")
    if loglik_full < loglik_null - SLACK * abs(loglik_null):
        raise UndefinedMeasureError("full model log-likelihood is below the null model")
    if loglik_full > SLACK:
        raise UndefinedMeasureError("log-likelihood of a categorical model cannot be positive")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def likelihood_ratio(loglik_full: float, loglik_null: float) -> float:
    """gamma = loglik_full / loglik_null, clamped to [0, 1]."""
    _check_logliks(loglik_full, loglik_null)
    return _clamp01(loglik_full / loglik_null)


def g_statistic(loglik_full: float, loglik_null: float) -> float:
    return max(0.0, -2.0 * (loglik_null - loglik_full))


def r2_mcfadden(loglik_full: float, loglik_null: float) -> float:
    return 1.0 - likelihood_ratio(loglik_full, loglik_null)


def r2_modified(loglik_full: float, loglik_null: float, r: int, spec: PenaltySpec | str) -> float:
    gamma = likelihood_ratio(loglik_full, loglik_null)
    lam = penalty(spec, r)
    if lam == 1.0:
        return 1.0 - gamma
    return _clamp01(1.0 - gamma**lam)


def r2_coxsnell(loglik_full: float, loglik_null: float, n: int) -> float:
    _check_logliks(loglik_full, loglik_null)
    if n < 1:
        raise UndefinedMeasureError("sample size must be positive")
    # -expm1 keeps precision when the likelihoods are close
    return _clamp01(-math.expm1(2.0 * (loglik_null - loglik_full) / n))


def r2_nagelkerke(loglik_full: float, loglik_null: float, n: int) -> float:
    cs = r2_coxsnell(loglik_full, loglik_null, n)
    bound = -math.expm1(2.0 * loglik_null / n)
    if bound <= 0:
        raise UndefinedMeasureError("Nagelkerke bound is zero")
    return _clamp01(cs / bound)


# ---------------------------------------------------------------------------
# measures that do not use the likelihood


def r2_mckelvey_zavoina(linear_predictors, link: LinkKind | str) -> float:
    """Var(eta) / (Var(eta) + error variance), population variance of eta."""
    eta = np.asarray(linear_predictors, dtype=float)
    if eta.size < 2:
        raise UndefinedMeasureError("McKelvey-Zavoina needs at least two observations")
    v = float(np.var(eta))
    return v / (v + links.error_variance(link))


@dataclass(frozen=True)
class TjurResult:
    value: float
    raw: float

    @property
    def clamped(self) -> bool:
        return self.raw < 0


def tjur(fitted_p1, y) -> TjurResult:
    """Coefficient of discrimination with the unclamped value kept."""
    p = np.asarray(fitted_p1, dtype=float)
    yy = np.asarray(y)
    labels = np.unique(yy)
    if len(labels) > 2:
        raise InapplicableMeasureError("Tjur's coefficient needs a binary response")
    if len(labels) < 2:
        raise UndefinedMeasureError("Tjur's coefficient needs both outcome classes")
    hi = yy == labels[1]
    raw = float(p[hi].mean() - p[~hi].mean())
    return TjurResult(max(0.0, raw), raw)


def r2_tjur(fitted_p1, y) -> float:
    """``fitted_p1`` is the event probability; the event is the larger label of ``y``."""
    return tjur(fitted_p1, y).value


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class GofReport:
    n: int
    r: int
    loglik_full: float
    loglik_null: float
    gamma_r: float
    g_statistic: float
    measures: dict[str, float]
    missing: dict[str, str] = field(default_factory=dict)
    flags: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.measures[key]

    def __contains__(self, key: str) -> bool:
        return key in self.measures

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "loglik_full": self.loglik_full,
            "loglik_null": self.loglik_null,
            "gamma_r": self.gamma_r,
            "g_statistic": self.g_statistic,
            "measures": dict(self.measures),
            "missing": dict(self.missing),
            "flags": dict(self.flags),
        }


def report_from_logliks(loglik_full: float, loglik_null: float, n: int, r: int,
                        penalties=CANDIDATES, *, linear_predictors=None, link=None,
                        fitted_p1=None, response=None) -> GofReport:
    """Assemble a report; measures that cannot be computed are listed in ``missing``."""
    measures: dict[str, float] = {}
    missing: dict[str, str] = {}
    flags: dict[str, str] = {}

    def put(key, fn):
        try:
            measures[key] = fn()
        except UndefinedMeasureError as exc:
            missing[key] = f"{exc.reason}: {exc}"

    try:
        gamma = likelihood_ratio(loglik_full, loglik_null)
    except UndefinedMeasureError:
        gamma = float("nan")
    put("mf", lambda: r2_mcfadden(loglik_full, loglik_null))
    put("cs", lambda: r2_coxsnell(loglik_full, loglik_null, n))
    put("nk", lambda: r2_nagelkerke(loglik_full, loglik_null, n))
    for spec in penalties:
        if isinstance(spec, str):
            spec = PenaltySpec.parse(spec)
        put(spec.measure_id, lambda s=spec: r2_modified(loglik_full, loglik_null, r, s))

    if linear_predictors is not None and link is not None:
        put("mz", lambda: r2_mckelvey_zavoina(linear_predictors, link))
        if "mz" in measures and r > 2:
            flags["mz"] = "extended"
    else:
        missing["mz"] = "unavailable: needs linear predictors"

    if r != 2:
        missing["tj"] = "inapplicable: Tjur's coefficient is binary only"
    elif fitted_p1 is not None and response is not None:
        try:
            res = tjur(fitted_p1, response)
            measures["tj"] = res.value
            if res.clamped:
                flags["tj"] = f"negative raw value {res.raw:.6g} clamped to 0"
        except UndefinedMeasureError as exc:
            missing["tj"] = f"{exc.reason}: {exc}"
    else:
        missing["tj"] = "unavailable: needs fitted probabilities"

    return GofReport(n=int(n), r=int(r), loglik_full=float(loglik_full), loglik_null=float(loglik_null),
                     gamma_r=gamma, g_statistic=g_statistic(loglik_full, loglik_null),
                     measures=measures, missing=missing, flags=flags)


def gof_report(model, penalties=CANDIDATES) -> GofReport:
    """All applicable measures for a fitted cumulative/binary model.

    ``loglik_null`` is the closed-form thresholds-only value stored on the
    model, so gamma carries no optimizer noise from a second fit.
    """
    if not model.converged and not model.separated:
        raise ValueError("model did not converge; refusing to report fit measures")
    p1 = model.fitted_probs[:, 1] if model.r == 2 else None
    report = report_from_logliks(
        model.loglik, model.null_loglik, model.n, model.r, penalties,
        linear_predictors=model.linear_predictors, link=model.link,
        fitted_p1=p1, response=model.response,
    )
    if model.separated:
        report.flags["model"] = "separation"
    return report
