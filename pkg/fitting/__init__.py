"""Exponential-polynomial fitting and structure recovery."""
from fitting.structfit import (
    ExponentialFit,
    FitProblem,
    detect_frequencies,
    fit_exponential_sum,
    recover_structure,
    required_cutoff,
    required_truncation,
    separate_sectors,
)

__all__ = [
    "ExponentialFit",
    "FitProblem",
    "detect_frequencies",
    "fit_exponential_sum",
    "recover_structure",
    "required_cutoff",
    "required_truncation",
    "separate_sectors",
]
