"""Structured Donaldson series, insertions and transforms."""
from invariants.series import (
    DonaldsonSeries,
    OneCycleWord,
    Sector,
    SeriesFlags,
    SeriesTerm,
    basic_classes,
    expand,
    expand_restricted,
    expand_to,
    symmetrize,
)

__all__ = [
    "DonaldsonSeries",
    "OneCycleWord",
    "Sector",
    "SeriesFlags",
    "SeriesTerm",
    "basic_classes",
    "expand",
    "expand_restricted",
    "expand_to",
    "symmetrize",
]
