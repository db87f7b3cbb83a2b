"""Binary and ordinal regression fit measures, including the penalized likelihood ratio index."""

from .errors import (
    ConvergenceError,
    DataError,
    Ordr2Error,
    UndefinedMeasureError,
)
from .estimation import Dataset, FittedModel, LinearFit, fit_binary, fit_clm, fit_null, fit_ols, predict_probs
from .gof import GofReport, PenaltySpec, gof_report, penalty, r2_mcfadden, r2_modified
from .links import LinkKind

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DataError",
    "Dataset",
    "FittedModel",
    "GofReport",
    "LinearFit",
    "LinkKind",
    "Ordr2Error",
    "PenaltySpec",
    "UndefinedMeasureError",
    "fit_binary",
    "fit_clm",
    "fit_null",
    "fit_ols",
    "gof_report",
    "penalty",
    "predict_probs",
    "r2_mcfadden",
    "r2_modified",
]
