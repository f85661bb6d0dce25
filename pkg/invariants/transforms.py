"""Blow-up, blow-down, recoloring and S1xS3 bookkeeping on structured series."""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from algebra.gaussian import ONE, I, gaussian
from core.errors import DonaldsonValidationError, LatticeError, ParityError
from invariants.series import (
    DonaldsonSeries,
    Sector,
    SeriesFlags,
    km_sign_exponent,
    require_sst_shape,
    series_variables,
    symmetrize,
)
from lattice.forms import CohClass, Lattice

BLOWUP_SUFFIX = "#-CP2"
S1S3_SUFFIX = "#S1xS3"


class BlowupVariant(str, Enum):
    COSH = "cosh"
    SINH = "sinh"


@dataclass(frozen=True)
class BlowupMap:
    """Source lattice, its extension by <E> with E^2 = -1, and E's index."""

    source: Lattice
    target: Lattice
    index: int

    @classmethod
    def of(cls, source: Lattice, label: Optional[str] = None) -> "BlowupMap":
        return cls(source, source.extend(label, -1), source.rank)

    @property
    def exceptional(self) -> CohClass:
        """Poincare dual of the exceptional sphere: value -1 on it."""
        return CohClass(tuple(-1 if j == self.index else 0 for j in range(self.target.rank)))


def blow_up(S: DonaldsonSeries, variant: BlowupVariant = BlowupVariant.COSH) -> DonaldsonSeries:
    """Structured blow-up of a simple-type-shaped series.

    cosh keeps w and sends (K, p) to (K+E, p/2) and (K-E, p/2); sinh uses
    w+E and sends (K, p) to (K+E, -p/2) and (K-E, p/2). The Minus sector is
    regenerated by symmetrize.
    """
    variant = BlowupVariant(variant)
    require_sst_shape(S, "blow_up")
    bmap = BlowupMap.of(S.lattice)
    E = bmap.exceptional
    variables = series_variables(bmap.target.rank)
    positions = list(range(S.rank)) + [S.rank + 1]
    half = gaussian(1) / 2
    plus_sign = -half if variant == BlowupVariant.SINH else half

    terms = []
    for term in S.plus_terms:
        lifted = term.poly.remap(variables, positions)
        K = term.K.extended(0)
        terms.append((Sector.PLUS, K + E, lifted.scale(plus_sign)))
        terms.append((Sector.PLUS, K - E, lifted.scale(half)))

    w = S.w.extended(0)
    if variant == BlowupVariant.SINH:
        w = w + E
    manifold = replace(S.manifold, lattice=bmap.target, name=S.manifold.name + BLOWUP_SUFFIX)
    flags = SeriesFlags(claims_characteristic=S.flags.claims_characteristic, claims_sst=True)
    blown = DonaldsonSeries.build(manifold, w, terms, S.zword, flags)
    return symmetrize(blown)


def blow_down_derivative(S: DonaldsonSeries, e_index: Optional[int] = None) -> DonaldsonSeries:
    """d/dr at r = 0 of the series along tD + rE, restricted to E's complement.

    Args:
        S: Series on a lattice with an orthogonal class E, E^2 = -1
        e_index: Basis index of E (default: the last one)

    Raises:
        LatticeError: If the chosen basis vector is not an orthogonal (-1)
    """
    lattice = S.lattice
    index = lattice.rank - 1 if e_index is None else e_index
    if not 0 <= index < lattice.rank:
        raise LatticeError(f"index {index} outside rank {lattice.rank}")
    if lattice.gram[index][index] != -1:
        raise LatticeError(f"E^2 = {lattice.gram[index][index]}, expected -1")
    target = lattice.drop(index)

    variables = S.variables
    t_e = variables[index]
    reduced_vars = series_variables(target.rank)
    positions = [None if j == index else (j if j < index else j - 1) for j in range(lattice.rank)]
    positions.append(target.rank)

    terms = []
    for sector, K, p in S.raw_terms():
        weight = K[index] if sector == Sector.PLUS else I * K[index]
        derived = (p.diff(t_e) + p.scale(weight)).at_zero(t_e)
        terms.append((sector, K.dropped(index), derived.remap(reduced_vars, positions)))

    name = S.manifold.name
    if name.endswith(BLOWUP_SUFFIX):
        name = name[: -len(BLOWUP_SUFFIX)]
    manifold = replace(S.manifold, lattice=target, name=name)
    result = DonaldsonSeries.build(
        manifold,
        S.w.dropped(index),
        terms,
        S.zword,
        SeriesFlags(claims_characteristic=S.flags.claims_characteristic),
    )
    sst = all(t.poly.is_constant() for t in result.terms)
    symmetric = False
    if S.flags.claims_symmetric:
        try:
            symmetric = symmetrize(result).minus_terms == result.minus_terms
        except ParityError:
            symmetric = False
    return result.with_terms(
        result.raw_terms(),
        replace(result.flags, claims_sst=sst, claims_symmetric=symmetric),
    )


def recolor(S: DonaldsonSeries, w_new: CohClass) -> DonaldsonSeries:
    """Change w, flipping each Plus coefficient by (-1)^((K.(w+w') + w^2 + w'^2)/2).

    Raises:
        ParityError: If a sign exponent is not an integer
    """
    require_sst_shape(S, "recolor")
    S.lattice.check(w_new, "w")
    terms = []
    for term in S.plus_terms:
        exponent = km_sign_exponent(S.lattice, term.K, S.w) + km_sign_exponent(
            S.lattice, term.K, w_new
        )
        sign = -1 if exponent % 2 else 1
        terms.append((Sector.PLUS, term.K, term.poly.scale(sign)))
    flags = replace(S.flags, claims_sst=True)
    return symmetrize(S.with_terms(terms, flags, w=w_new))


def twist_by_even(S: DonaldsonSeries, alpha: CohClass) -> DonaldsonSeries:
    """D^(w + 2 alpha) = (-1)^(alpha^2) D^w, applied to both sectors.

    Raises:
        ParityError: If alpha^2 is not an integer
    """
    S.lattice.check(alpha, "alpha")
    a2 = S.lattice.cohomology_square(alpha)
    if a2.denominator != 1:
        raise ParityError(f"alpha^2 = {a2} is not an integer", {"alpha": alpha.to_list()})
    sign = -ONE if a2.numerator % 2 else ONE
    return S.with_terms(
        [(s, K, p.scale(sign)) for s, K, p in S.raw_terms()],
        S.flags,
        w=S.w + 2 * alpha,
    )


def connect_sum_s1s3(S: DonaldsonSeries, cycle: str) -> DonaldsonSeries:
    """Sum with S1xS3: same terms, b1 + 1, z gains the new 1-cycle.

    Raises:
        DonaldsonValidationError: If the cycle label is already used
    """
    if not cycle:
        raise DonaldsonValidationError("cycle label must be non-empty")
    zword = S.zword.extended(cycle)
    manifold = replace(
        S.manifold,
        b1=S.manifold.b1 + 1,
        name=S.manifold.name + S1S3_SUFFIX,
        strong_simple_type=False,
    )
    return S.with_terms(S.raw_terms(), S.flags, manifold=manifold, zword=zword)
