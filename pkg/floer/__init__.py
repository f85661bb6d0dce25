"""Fukaya-Floer eigenvalue data and the annihilators derived from it."""
from floer.hff import (
    AnnihilatorFactor,
    AnnihilatorOp,
    EffectiveRing,
    Eigenvalue,
    HFFSpectrum,
    annihilators,
    check_annihilated,
    spectrum,
)

__all__ = [
    "AnnihilatorFactor",
    "AnnihilatorOp",
    "EffectiveRing",
    "Eigenvalue",
    "HFFSpectrum",
    "annihilators",
    "check_annihilated",
    "spectrum",
]
