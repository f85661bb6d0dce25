"""Exact arithmetic kernel: Gaussian rationals, polynomials and truncated series."""
from algebra.gaussian import I, ONE, ZERO, GaussianRational, format_gaussian, gaussian, parse_gaussian
from algebra.poly import LAMBDA, MultiPoly, poly_arith
from algebra.truncated import Truncation, TruncSeries, exp_truncated, series_mul, truncate

__all__ = [
    "I",
    "ONE",
    "ZERO",
    "GaussianRational",
    "format_gaussian",
    "gaussian",
    "parse_gaussian",
    "LAMBDA",
    "MultiPoly",
    "poly_arith",
    "Truncation",
    "TruncSeries",
    "exp_truncated",
    "series_mul",
    "truncate",
]
