"""Intersection lattices and characteristic-vector arithmetic."""
from lattice.forms import (
    CohClass,
    D0Report,
    Lattice,
    ManifoldData,
    d0,
    d0_mod4,
    is_characteristic,
    pairing,
)

__all__ = [
    "CohClass",
    "D0Report",
    "Lattice",
    "ManifoldData",
    "d0",
    "d0_mod4",
    "is_characteristic",
    "pairing",
]
