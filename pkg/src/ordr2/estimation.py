"""Maximum-likelihood fitting of cumulative link models and OLS.

The cumulative model is parameterized as

    P(y <= j | x) = F(tau_j - x'beta),   j = 1..r-1,

so a positive coefficient shifts mass toward higher categories. Binary data
is the r = 2 special case; :func:`fit_binary` provides a separate IRLS path
for it with an explicit intercept (equal to ``-tau_1``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import links
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateResponseError,
    SchemaError,
    SingularDesignError,
    ThresholdOrderError,
)
from .links import LinkKind

log = logging.getLogger(__name__)

CONTINUOUS = "continuous"
ORDINAL = "ordinal"

GRAD_TOL = 1e-6
LOGLIK_TOL = 1e-10
MAX_ITER = 100
MAX_HALVINGS = 30
SEPARATION_NORM = 1e3


@dataclass(frozen=True)
class Dataset:
    """Named covariate columns plus a continuous or ordinal response."""

    names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    kind: str = ORDINAL
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if len(self.names) == 1 else X.reshape(len(X), 0)
        y = np.asarray(self.y)
        if y.ndim != 1 or len(y) < 1:
            raise DataError("response must be a non-empty vector")
        if X.shape[0] != len(y):
            raise DataError(f"covariates have {X.shape[0]} rows but response has {len(y)}")
        if X.shape[1] != len(self.names):
            raise DataError(f"{len(self.names)} names for {X.shape[1]} columns")
        if len(set(self.names)) != len(self.names):
            raise DataError("duplicate column names")
        if self.kind == ORDINAL:
            if not np.all(np.isfinite(y.astype(float))) or np.any(y != np.round(y)):
                raise DataError("ordinal response must hold integer codes")
            y = y.astype(int)
            if y.min() < 1:
                raise DataError("ordinal codes must start at 1")
        elif self.kind == CONTINUOUS:
            y = y.astype(float)
        else:
            raise DataError(f"unknown response kind {self.kind!r}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def from_columns(cls, columns: Mapping[str, Sequence[float]] | Sequence[tuple[str, Sequence[float]]],
                     response, kind: str = ORDINAL, **meta) -> "Dataset":
        items = list(columns.items()) if isinstance(columns, Mapping) else list(columns)
        names = tuple(name for name, _ in items)
        n = len(response)
        X = np.column_stack([np.asarray(v, dtype=float) for _, v in items]) if items else np.empty((n, 0))
        return cls(names, X, np.asarray(response), kind, dict(meta))

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def r(self) -> int:
        if self.kind != ORDINAL:
            raise DataError("category count is only defined for ordinal responses")
        return int(self.y.max())

    def counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.r + 1)[1:]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.names.index(name)]

    def with_response(self, y, kind: str) -> "Dataset":
        return Dataset(self.names, self.X, y, kind, dict(self.meta))

    def select(self, names: Sequence[str]) -> "Dataset":
        missing = [c for c in names if c not in self.names]
        if missing:
            raise SchemaError(f"unknown columns: {', '.join(missing)}")
        idx = [self.names.index(c) for c in names]
        return Dataset(tuple(names), self.X[:, idx], self.y, self.kind, dict(self.meta))


@dataclass(frozen=True)
class LinearFit:
    names: tuple[str, ...]
    beta_tilde: np.ndarray  # intercept first
    fitted: np.ndarray
    residual_ss: float
    total_ss: float
    r2_ols: float

    @property
    def intercept(self) -> float:
        return float(self.beta_tilde[0])

    @property
    def coefficients(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.beta_tilde[1:])))


@dataclass(frozen=True)
class FittedModel:
    link: LinkKind
    names: tuple[str, ...]
    beta: np.ndarray
    tau: np.ndarray
    loglik: float
    null_loglik: float
    linear_predictors: np.ndarray
    fitted_probs: np.ndarray
    response: np.ndarray
    converged: bool
    iterations: int
    gradient_norm: float
    warnings: tuple[str, ...] = ()
    covariance: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.response)

    @property
    def r(self) -> int:
        return len(self.tau) + 1

    @property
    def intercept(self) -> float:
        """Binary-GLM intercept, i.e. the negated single threshold."""
        if self.r != 2:
            raise ValueError("intercept is only defined for binary fits")
        return -float(self.tau[0])

    @property
    def coefficients(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.beta)))

    @property
    def separated(self) -> bool:
        return "separation" in self.warnings

    def std_errors(self) -> np.ndarray | None:
        if self.covariance is None:
            return None
        return np.sqrt(np.diag(self.covariance))


# ---------------------------------------------------------------------------
# OLS


def fit_ols(data: Dataset) -> LinearFit:
    if data.kind != CONTINUOUS:
        raise DataError("fit_ols needs a continuous response")
    n, p = data.X.shape
    if n <= p + 1:
        raise SingularDesignError(f"need n > p + 1 observations, got n={n}, p={p}")
    Z = np.column_stack([np.ones(n), data.X])
    if np.linalg.matrix_rank(Z) < p + 1:
        raise SingularDesignError("design matrix with intercept is rank deficient")
    y = data.y
    ybar = y.mean()
    total_ss = float(np.sum((y - ybar) ** 2))
    if total_ss == 0.0:
        raise DegenerateResponseError("response is constant")
    beta, *_ = np.linalg.lstsq(Z, y, rcond=None)
    fitted = Z @ beta
    residual_ss = float(np.sum((y - fitted) ** 2))
    return LinearFit(data.names, beta, fitted, residual_ss, total_ss, 1.0 - residual_ss / total_ss)


# ---------------------------------------------------------------------------
# Cumulative link likelihood


def null_loglik(counts) -> float:
    """Closed-form thresholds-only log-likelihood, sum_j n_j log(n_j / n)."""
    counts = np.asarray(counts, dtype=float)
    if np.any(counts <= 0):
        raise DegenerateResponseError("every category needs at least one observation")
    return float(np.sum(counts * np.log(counts / counts.sum())))


def _check_categories(y: np.ndarray) -> int:
    r = int(y.max())
    if r < 2:
        raise DegenerateResponseError("response has a single category")
    counts = np.bincount(y, minlength=r + 1)[1:]
    if np.any(counts == 0):
        empty = [str(j + 1) for j in np.flatnonzero(counts == 0)]
        raise DegenerateResponseError(f"categories never observed: {', '.join(empty)}")
    return r


def _category_terms(beta, tau, X, y, link):
    """Per-observation boundary quantities of the cumulative likelihood."""
    r = len(tau) + 1
    eta = X @ beta if X.shape[1] else np.zeros(len(y))
    has_up = y < r
    has_lo = y > 1
    tau_ext = np.concatenate(([0.0], tau, [0.0]))
    u = np.where(has_up, tau_ext[y] - eta, 0.0)
    lo = np.where(has_lo, tau_ext[y - 1] - eta, 0.0)

    Fu = np.where(has_up, links.cdf(link, u), 1.0)
    Su = np.where(has_up, links.sf(link, u), 0.0)
    Fl = np.where(has_lo, links.cdf(link, lo), 0.0)
    Sl = np.where(has_lo, links.sf(link, lo), 1.0)
    # difference taken on whichever tail keeps significant digits
    mid = np.where(~has_up, 1.0, np.where(~has_lo, -1.0, 0.5 * (u + lo)))
    prob = np.where(mid > 0, Sl - Su, Fu - Fl)
    prob = np.clip(prob, links.CDF_FLOOR, 1.0)

    fu = np.where(has_up, links.pdf(link, u), 0.0)
    fl = np.where(has_lo, links.pdf(link, lo), 0.0)
    dfu = np.where(has_up, links.pdf_deriv(link, u), 0.0)
    dfl = np.where(has_lo, links.pdf_deriv(link, lo), 0.0)
    return eta, prob, fu, fl, dfu, dfl, has_up, has_lo


def loglik_grad_hess(beta, tau, X, y, link: LinkKind | str, *, hessian: bool = True):
    """Log-likelihood, score and Hessian in the natural (beta, tau) parameters.

    Parameters are ordered ``[beta_1..beta_p, tau_1..tau_{r-1}]``. Thresholds
    must be strictly increasing; an unordered point raises
    :class:`ThresholdOrderError` since the likelihood is undefined there.
    """
    link = LinkKind.parse(link)
    beta = np.asarray(beta, dtype=float)
    tau = np.asarray(tau, dtype=float)
    X = np.asarray(X, dtype=float).reshape(len(y), -1)
    y = np.asarray(y, dtype=int)
    if len(tau) < 1:
        raise ValueError("need at least one threshold")
    if np.any(np.diff(tau) <= 0):
        raise ThresholdOrderError("thresholds must be strictly increasing")
    if y.min() < 1 or y.max() > len(tau) + 1:
        raise DataError("response codes outside 1..r")
    p = X.shape[1]
    m = len(tau)

    _, prob, fu, fl, dfu, dfl, has_up, has_lo = _category_terms(beta, tau, X, y, link)
    value = float(np.sum(np.log(prob)))

    gu = fu / prob
    gl = fl / prob
    up_idx = np.where(has_up, y - 1, 0)
    lo_idx = np.where(has_lo, y - 2, 0)

    grad = np.empty(p + m)
    grad[:p] = -X.T @ (gu - gl)
    grad[p:] = np.bincount(up_idx, weights=gu, minlength=m) - np.bincount(lo_idx, weights=gl, minlength=m)
    if not hessian:
        return value, grad

    h_uu = dfu / prob - gu * gu
    h_ll = -dfl / prob - gl * gl
    h_ul = gu * gl
    H = np.zeros((p + m, p + m))
    w_bb = (dfu - dfl) / prob - (gu - gl) ** 2
    H[:p, :p] = X.T @ (X * w_bb[:, None])
    # beta-tau cross terms
    c_up = -(dfu / prob - gu * (gu - gl))
    c_lo = dfl / prob - gl * (gu - gl)
    for k in range(m):
        col = X.T @ (c_up * (up_idx == k) * has_up) + X.T @ (c_lo * (lo_idx == k) * has_lo)
        H[:p, p + k] = col
        H[p + k, :p] = col
    T = np.zeros((m, m))
    np.add.at(T, (up_idx[has_up], up_idx[has_up]), h_uu[has_up])
    np.add.at(T, (lo_idx[has_lo], lo_idx[has_lo]), h_ll[has_lo])
    both = has_up & has_lo
    np.add.at(T, (up_idx[both], lo_idx[both]), h_ul[both])
    np.add.at(T, (lo_idx[both], up_idx[both]), h_ul[both])
    H[p:, p:] = T
    return value, grad, H


def fisher_information(beta, tau, X, link: LinkKind | str) -> np.ndarray:
    """Expected information matrix of the cumulative model at (beta, tau)."""
    link = LinkKind.parse(link)
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    m = len(tau)
    eta = X @ beta if p else np.zeros(n)
    z = np.asarray(tau)[None, :] - eta[:, None]
    F = np.column_stack([np.zeros(n), links.cdf(link, z), np.ones(n)])
    f = np.column_stack([np.zeros(n), links.pdf(link, z), np.zeros(n)])
    prob = np.clip(np.diff(F, axis=1), links.CDF_FLOOR, 1.0)  # n x r
    r = m + 1
    D = np.zeros((n, r, p + m))
    df = f[:, 1:] - f[:, :-1]  # n x r
    D[:, :, :p] = -df[:, :, None] * X[:, None, :]
    for j in range(r):
        if j < m:
            D[:, j, p + j] = f[:, j + 1]
        if j > 0:
            D[:, j, p + j - 1] = -f[:, j]
    return np.einsum("ijk,ij,ijl->kl", D, 1.0 / prob, D)


def _to_natural(theta, p):
    beta = theta[:p]
    tau = theta[p] + np.concatenate(([0.0], np.cumsum(np.exp(theta[p + 1:]))))
    return beta, tau


def _from_natural(beta, tau):
    return np.concatenate([beta, [tau[0]], np.log(np.diff(tau))])


def _reparam_jacobian(theta, p):
    """d(beta, tau)/d(theta) for the log-increment threshold parameterization."""
    m = len(theta) - p
    J = np.eye(p + m)
    inc = np.exp(theta[p + 1:])
    for j in range(m):
        J[p + j, p] = 1.0
        for k in range(1, j + 1):
            J[p + j, p + k] = inc[k - 1]
    return J


def _predict(beta, tau, X, link):
    n = X.shape[0]
    eta = X @ beta if X.shape[1] else np.zeros(n)
    z = np.asarray(tau)[None, :] - eta[:, None]
    F = np.column_stack([np.zeros(n), links.cdf(link, z), np.ones(n)])
    return eta, np.clip(np.diff(F, axis=1), 0.0, 1.0)


def _build_model(link, names, beta, tau, X, y, *, converged, iterations, grad_norm, warnings=(),
                 covariance=None, loglik=None):
    eta, probs = _predict(beta, tau, X, link)
    if loglik is None:
        loglik = loglik_grad_hess(beta, tau, X, y, link, hessian=False)[0]
    counts = np.bincount(y, minlength=len(tau) + 2)[1:]
    return FittedModel(
        link=link,
        names=tuple(names),
        beta=np.asarray(beta, dtype=float),
        tau=np.asarray(tau, dtype=float),
        loglik=float(loglik),
        null_loglik=null_loglik(counts),
        linear_predictors=eta,
        fitted_probs=probs,
        response=np.asarray(y, dtype=int),
        converged=bool(converged),
        iterations=int(iterations),
        gradient_norm=float(grad_norm),
        warnings=tuple(warnings),
        covariance=covariance,
    )


def _check_ordinal_design(data: Dataset):
    if data.kind != ORDINAL:
        raise DataError("an ordinal response is required")
    if data.p:
        Z = np.column_stack([np.ones(data.n), data.X])
        if np.linalg.matrix_rank(Z) < data.p + 1:
            raise SingularDesignError(
                "design is rank deficient together with the thresholds "
                "(an intercept column is not allowed in cumulative models)")


def _null_thresholds(y, r, link):
    counts = np.bincount(y, minlength=r + 1)[1:]
    cum = np.cumsum(counts)[:-1] / counts.sum()
    return np.asarray(links.quantile(link, cum), dtype=float).reshape(-1)


def fit_null(response, link: LinkKind | str = LinkKind.PROBIT) -> FittedModel:
    """Thresholds-only model in closed form."""
    link = LinkKind.parse(link)
    y = np.asarray(response)
    if np.any(y != np.round(y)):
        raise DataError("ordinal response must hold integer codes")
    y = y.astype(int)
    if y.min() < 1:
        raise DataError("ordinal codes must start at 1")
    r = _check_categories(y)
    tau = _null_thresholds(y, r, link)
    counts = np.bincount(y, minlength=r + 1)[1:]
    n = len(y)
    probs = np.tile(counts / n, (n, 1))
    ll = null_loglik(counts)
    return FittedModel(
        link=link, names=(), beta=np.zeros(0), tau=tau, loglik=ll, null_loglik=ll,
        linear_predictors=np.zeros(n), fitted_probs=probs, response=y,
        converged=True, iterations=0, gradient_norm=0.0,
    )


def _perfect_predictions(beta, tau, X, y, link) -> bool:
    """True when some observed category has fitted probability numerically 1."""
    if X.shape[1] == 0:
        return False
    prob = _category_terms(beta, tau, X, y, link)[1]
    return bool(np.any(prob > 1.0 - 1e-10))


def _separating_direction(X, y, r) -> bool:
    """True when the data admit a nonzero recession direction of the likelihood.

    Looks for (d, c) with c ordered and c[y-1] <= x'd <= c[y] for every row,
    maximizing the total slack inside a unit box. A positive optimum means
    moving along (d, c) never lowers any contribution and raises some, so
    the maximum likelihood estimate does not exist (complete or
    quasi-complete separation). With every category observed the optimum
    forces d != 0.
    """
    from scipy.optimize import linprog

    n, p = X.shape
    if p == 0:
        return False
    m = r - 1
    y = np.asarray(y, dtype=int)
    lower = y > 1   # c[y-1] - x'd <= 0
    upper = y < r   # x'd - c[y] <= 0
    rows = []
    if lower.any():
        A = np.zeros((lower.sum(), p + m))
        A[:, :p] = -X[lower]
        A[np.arange(len(A)), p + y[lower] - 2] = 1.0
        rows.append(A)
    if upper.any():
        A = np.zeros((upper.sum(), p + m))
        A[:, :p] = X[upper]
        A[np.arange(len(A)), p + y[upper] - 1] = -1.0
        rows.append(A)
    if m > 1:
        A = np.zeros((m - 1, p + m))
        A[np.arange(m - 1), p + np.arange(m - 1)] = 1.0
        A[np.arange(m - 1), p + np.arange(1, m)] = -1.0
        rows.append(A)
    A_ub = np.vstack(rows)
    n_obs = lower.sum() + upper.sum()
    # total slack is -sum of the observation rows of A_ub @ z
    cost = A_ub[:n_obs].sum(axis=0)
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(len(A_ub)), bounds=(-1.0, 1.0), method="highs")
    if res.status != 0:
        return False
    scale = max(1.0, float(np.max(np.abs(X))))
    return bool(-res.fun > 1e-7 * n * scale)


def _rounding_slack(value):
    # changes below a few ulps of |loglik| are not resolvable
    return 8.0 * np.finfo(float).eps * max(1.0, abs(value))


def _covariance(H):
    try:
        np.linalg.cholesky(-H)
    except np.linalg.LinAlgError:
        return None
    return np.linalg.inv(-H)


def fit_clm(data: Dataset, link: LinkKind | str = LinkKind.PROBIT, *, max_iter: int = MAX_ITER,
            gtol: float = GRAD_TOL, ftol: float = LOGLIK_TOL) -> FittedModel:
    """Fit a cumulative link model by damped Newton-Raphson.

    Thresholds are optimized as ``tau_1`` plus log increments so every
    iterate is ordered. When the reparameterized Hessian is not negative
    definite the step falls back to Fisher scoring. Each step is halved
    until the log-likelihood increases (at most 30 halvings).

    Raises :class:`ConvergenceError` (carrying the last iterate) if the
    score norm is still above ``gtol`` when iteration stops. Diverging
    coefficients (``||beta|| > 1e3``) stop the fit with a ``"separation"``
    warning instead of raising.
    """
    link = LinkKind.parse(link)
    _check_ordinal_design(data)
    X, y = data.X, data.y
    r = _check_categories(y)
    p = data.p

    beta = np.zeros(p)
    tau = _null_thresholds(y, r, link)
    theta = _from_natural(beta, tau)
    value, grad, H = loglik_grad_hess(beta, tau, X, y, link)
    warnings: list[str] = []
    it = stalled = 0
    while it < max_iter:
        if np.max(np.abs(grad), initial=0.0) < gtol:
            break
        it += 1
        J = _reparam_jacobian(theta, p)
        g_t = J.T @ grad
        H_t = J.T @ H @ J
        g_tau = grad[p:]
        for k in range(1, r - 1):
            H_t[p + k, p + k] += np.sum(g_tau[k:]) * np.exp(theta[p + k])
        try:
            L = np.linalg.cholesky(-H_t)
            step = np.linalg.solve(L.T, np.linalg.solve(L, g_t))
        except np.linalg.LinAlgError:
            info = J.T @ fisher_information(beta, tau, X, link) @ J
            step = np.linalg.lstsq(info, g_t, rcond=None)[0]

        scale = 1.0
        improved = False
        for _ in range(MAX_HALVINGS + 1):
            cand = theta + scale * step
            b_c, t_c = _to_natural(cand, p)
            if np.all(np.isfinite(t_c)) and np.all(np.diff(t_c) > 0):
                v_c = loglik_grad_hess(b_c, t_c, X, y, link, hessian=False)[0]
                if np.isfinite(v_c) and v_c >= value - _rounding_slack(value):
                    improved = True
                    break
            scale *= 0.5
        if not improved:
            log.debug("step halving exhausted at iteration %d", it)
            break
        delta = v_c - value
        theta, beta, tau = cand, b_c, t_c
        value, grad, H = loglik_grad_hess(beta, tau, X, y, link)
        if np.linalg.norm(beta) > SEPARATION_NORM:
            warnings.append("separation")
            break
        # a single tiny change is usually the step before the last Newton step
        stalled = stalled + 1 if abs(delta) < ftol else 0
        if stalled >= 2:
            break

    grad_norm = float(np.max(np.abs(grad), initial=0.0))
    if not warnings and _perfect_predictions(beta, tau, X, y, link) and _separating_direction(X, y, len(tau) + 1):
        warnings.append("separation")
    model = _build_model(link, data.names, beta, tau, X, y, converged=grad_norm < gtol, iterations=it,
                         grad_norm=grad_norm, warnings=warnings, covariance=_covariance(H), loglik=value)
    if not model.converged and not warnings:
        raise ConvergenceError(
            f"cumulative {link.value} fit stopped after {it} iterations with score norm {grad_norm:.3g}",
            model)
    return model


def fit_binary(data: Dataset, link: LinkKind | str = LinkKind.PROBIT, *, max_iter: int = MAX_ITER,
               gtol: float = GRAD_TOL) -> FittedModel:
    """Binary GLM by iteratively reweighted least squares.

    The response uses codes 1/2; the model is P(y = 2) = F(alpha + x'beta).
    The result is expressed in the cumulative convention (``tau_1 = -alpha``)
    so it can be compared with :func:`fit_clm` directly.
    """
    link = LinkKind.parse(link)
    _check_ordinal_design(data)
    y = data.y
    if _check_categories(y) != 2:
        raise DataError("fit_binary needs codes 1 and 2 only")
    X = data.X
    n, p = X.shape
    Z = np.column_stack([np.ones(n), X])
    event = (y == 2).astype(float)

    def evaluate(coef):
        eta = Z @ coef
        mu = links.cdf(link, eta)
        smu = links.sf(link, eta)
        ll = np.sum(np.where(event > 0, np.log(np.maximum(mu, links.CDF_FLOOR)),
                             np.log(np.maximum(smu, links.CDF_FLOOR))))
        f = links.pdf(link, eta)
        var = np.maximum(mu * smu, links.CDF_FLOOR)
        score = Z.T @ ((event - mu) * f / var)
        return float(ll), score, eta, mu, f, var

    coef = np.zeros(p + 1)
    coef[0] = links.quantile(link, event.mean())
    ll, score, eta, mu, f, var = evaluate(coef)
    warnings: list[str] = []
    it = 0
    while it < max_iter and np.max(np.abs(score)) >= gtol:
        it += 1
        w = f * f / var
        z = eta + (event - mu) / np.where(f > 0, f, links.CDF_FLOOR)
        ZW = Z * w[:, None]
        target = np.linalg.lstsq(ZW.T @ Z, ZW.T @ z, rcond=None)[0]
        step = target - coef
        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            cand = coef + scale * step
            res = evaluate(cand)
            if res[0] >= ll - _rounding_slack(ll):
                break
            scale *= 0.5
        else:
            break
        coef = cand
        ll, score, eta, mu, f, var = res
        if np.linalg.norm(coef[1:]) > SEPARATION_NORM:
            warnings.append("separation")
            break

    beta = coef[1:]
    tau = np.array([-coef[0]])
    value, grad, H = loglik_grad_hess(beta, tau, X, y, link)
    grad_norm = float(np.max(np.abs(grad)))
    if not warnings and _perfect_predictions(beta, tau, X, y, link) and _separating_direction(X, y, len(tau) + 1):
        warnings.append("separation")
    model = _build_model(link, data.names, beta, tau, X, y, converged=grad_norm < gtol, iterations=it,
                         grad_norm=grad_norm, warnings=warnings, covariance=_covariance(H), loglik=value)
    if not model.converged and not warnings:
        raise ConvergenceError(f"binary {link.value} IRLS did not converge after {it} iterations", model)
    return model


def predict_probs(model: FittedModel, data: Dataset) -> np.ndarray:
    """Category probabilities (n x r) for new data with the fitted column layout."""
    if tuple(data.names) != tuple(model.names):
        raise SchemaError(f"columns {list(data.names)} do not match fitted columns {list(model.names)}")
    return _predict(model.beta, model.tau, data.X, model.link)[1]


def linear_predictor(model: FittedModel, data: Dataset) -> np.ndarray:
    if tuple(data.names) != tuple(model.names):
        raise SchemaError(f"columns {list(data.names)} do not match fitted columns {list(model.names)}")
    return data.X @ model.beta if data.p else np.zeros(data.n)
