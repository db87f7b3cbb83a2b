"""Inverse link distributions for cumulative models.

Only the standard normal (probit) and standard logistic (logit) laws are
supported. All functions accept scalars or arrays and are vectorized.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import special

__all__ = [
    "LinkKind",
    "cdf",
    "sf",
    "pdf",
    "pdf_deriv",
    "quantile",
    "error_variance",
    "CDF_FLOOR",
    "CDF_CEIL",
]

CDF_FLOOR = 1e-300
CDF_CEIL = 1.0 - 1e-16


class LinkKind(str, enum.Enum):
    PROBIT = "probit"
    LOGIT = "logit"

    @classmethod
    def parse(cls, value: "LinkKind | str") -> "LinkKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown link {value!r}; expected 'probit' or 'logit'") from None


def error_variance(link: LinkKind | str) -> float:
    """Variance of the latent error distribution (1 for probit, pi^2/3 for logit)."""
    link = LinkKind.parse(link)
    return 1.0 if link is LinkKind.PROBIT else math.pi**2 / 3.0


def _check_finite(z):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("link functions require finite arguments")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def cdf(link: LinkKind | str, z):
    link = LinkKind.parse(link)
    arr = _check_finite(z)
    if link is LinkKind.PROBIT:
        res = special.ndtr(arr)
    else:
        res = special.expit(arr)
    return _out(res, z)


def sf(link: LinkKind | str, z):
    """Upper tail 1 - cdf(z), evaluated without cancellation."""
    link = LinkKind.parse(link)
    arr = _check_finite(z)
    if link is LinkKind.PROBIT:
        res = special.ndtr(-arr)
    else:
        res = special.expit(-arr)
    return _out(res, z)


def pdf(link: LinkKind | str, z):
    link = LinkKind.parse(link)
    arr = _check_finite(z)
    if link is LinkKind.PROBIT:
        res = np.exp(-0.5 * arr * arr) / math.sqrt(2.0 * math.pi)
    else:
        # F(z) * F(-z) is symmetric and stays finite for large |z|
        res = special.expit(arr) * special.expit(-arr)
    return _out(res, z)


def pdf_deriv(link: LinkKind | str, z):
    """First derivative of the density, used for analytic Hessians."""
    link = LinkKind.parse(link)
    arr = _check_finite(z)
    if link is LinkKind.PROBIT:
        res = -arr * pdf(link, arr)
    else:
        f = special.expit(arr)
        g = special.expit(-arr)
        res = f * g * (g - f)
    return _out(res, z)


def quantile(link: LinkKind | str, p):
    link = LinkKind.parse(link)
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("quantile requires probabilities strictly inside (0, 1)")
    if link is LinkKind.PROBIT:
        res = special.ndtri(arr)
    else:
        res = special.logit(arr)
    return _out(res, p)
