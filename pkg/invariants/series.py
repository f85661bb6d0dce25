"""Structured Donaldson series: two sectors of exponential-polynomial terms.

A Plus term (K, p) stands for exp(Q(t)/2 + 2*lam) * p(t, lam) * exp(K.t) and a
Minus term (K, q) for exp(-Q(t)/2 - 2*lam) * q(t, lam) * exp(i*K.t), where
t = (t1, ..., tn) are coordinates along the lattice basis.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from algebra.gaussian import ONE, I, GaussianRational, Scalar, as_gaussian, gaussian, i_power
from algebra.poly import LAMBDA, MultiPoly
from algebra.truncated import Truncation, TruncSeries, exp_truncated, mul_exp, parallelism
from core.errors import (
    DonaldsonValidationError,
    FlagViolationError,
    NotSimpleTypeError,
    ParityError,
)
from lattice.forms import CohClass, Lattice, ManifoldData, d0, d0_mod4, is_characteristic


class Sector(str, Enum):
    """Which exponential prefactor a term carries."""

    PLUS = "plus"
    MINUS = "minus"


_SECTOR_ORDER = {Sector.PLUS: 0, Sector.MINUS: 1}


def series_variables(rank: int) -> Tuple[str, ...]:
    """("t1", ..., "tn", "lam")."""
    return tuple(f"t{j + 1}" for j in range(rank)) + (LAMBDA,)


@dataclass(frozen=True)
class OneCycleWord:
    """Opaque record of the H1 insertions z; deg2z = 2 * deg(z)."""

    labels: Tuple[str, ...] = ()
    deg2z: Optional[int] = None

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise DonaldsonValidationError(f"duplicate 1-cycle labels: {list(labels)}")
        expected = 3 * len(labels)
        if self.deg2z is None:
            object.__setattr__(self, "deg2z", expected)
        elif self.deg2z != expected:
            raise DonaldsonValidationError(
                f"deg2z must be 3 per 1-cycle ({expected}), got {self.deg2z}"
            )
        object.__setattr__(self, "labels", labels)

    def extended(self, label: str) -> "OneCycleWord":
        if label in self.labels:
            raise DonaldsonValidationError(f"1-cycle {label!r} already present")
        return OneCycleWord(self.labels + (label,))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "deg2z": self.deg2z}


@dataclass(frozen=True)
class SeriesTerm:
    sector: Sector
    K: CohClass
    poly: MultiPoly

    def __post_init__(self):
        if self.poly.is_zero():
            raise DonaldsonValidationError(f"zero polynomial stored for class {self.K}")

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return (_SECTOR_ORDER[self.sector], self.K.coords)


@dataclass(frozen=True)
class SeriesFlags:
    claims_characteristic: bool = False
    claims_symmetric: bool = False
    claims_sst: bool = False

    def to_dict(self) -> Dict[str, bool]:
        return {
            "claims_characteristic": self.claims_characteristic,
            "claims_symmetric": self.claims_symmetric,
            "claims_sst": self.claims_sst,
        }


@dataclass(frozen=True)
class DonaldsonSeries:
    """Immutable structured series in canonical term order.

    Construct through ``DonaldsonSeries.build`` to merge duplicates and drop
    zero polynomials; the constructor itself only sorts and validates.
    """

    manifold: ManifoldData
    w: CohClass
    zword: OneCycleWord = field(default_factory=OneCycleWord)
    terms: Tuple[SeriesTerm, ...] = ()
    flags: SeriesFlags = field(default_factory=SeriesFlags)

    def __post_init__(self):
        lattice = self.manifold.lattice
        lattice.check(self.w, "w")
        variables = series_variables(lattice.rank)
        seen = set()
        for term in self.terms:
            lattice.check(term.K, "K")
            if term.poly.variables != variables:
                raise DonaldsonValidationError(
                    f"term polynomial uses {list(term.poly.variables)}, expected {list(variables)}"
                )
            if term.key in seen:
                raise DonaldsonValidationError(f"two {term.sector.value} terms for class {term.K}")
            seen.add(term.key)
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=lambda t: t.key)))

    @classmethod
    def build(
        cls,
        manifold: ManifoldData,
        w: CohClass,
        terms: Sequence[Tuple[Sector, CohClass, MultiPoly]],
        zword: Optional[OneCycleWord] = None,
        flags: Optional[SeriesFlags] = None,
    ) -> "DonaldsonSeries":
        """Sum polynomials sharing (sector, K), prune zeros and sort."""
        merged: Dict[Tuple[Sector, CohClass], MultiPoly] = {}
        for sector, K, poly in terms:
            key = (Sector(sector), K)
            merged[key] = merged[key] + poly if key in merged else poly
        kept = [SeriesTerm(s, K, p) for (s, K), p in merged.items() if not p.is_zero()]
        return cls(manifold, w, zword or OneCycleWord(), tuple(kept), flags or SeriesFlags())

    @property
    def lattice(self) -> Lattice:
        return self.manifold.lattice

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def variables(self) -> Tuple[str, ...]:
        return series_variables(self.rank)

    @property
    def plus_terms(self) -> Tuple[SeriesTerm, ...]:
        return tuple(t for t in self.terms if t.sector == Sector.PLUS)

    @property
    def minus_terms(self) -> Tuple[SeriesTerm, ...]:
        return tuple(t for t in self.terms if t.sector == Sector.MINUS)

    def is_zero(self) -> bool:
        return not self.terms

    def term(self, sector: Sector, K: CohClass) -> Optional[SeriesTerm]:
        for t in self.terms:
            if t.sector == sector and t.K == K:
                return t
        return None

    @property
    def d0(self) -> Fraction:
        return d0(self.manifold, self.w)

    @property
    def d0_minus_d(self) -> int:
        """d0 - d as an integer; raises ParityError otherwise."""
        return d0_mod4(self.manifold, self.w, self.zword.deg2z).d0_minus_d

    def with_terms(
        self,
        terms: Sequence[Tuple[Sector, CohClass, MultiPoly]],
        flags: Optional[SeriesFlags] = None,
        **changes,
    ) -> "DonaldsonSeries":
        """New series over the same data (or ``changes``) with other terms."""
        base = replace(self, terms=(), **changes) if changes else self
        return DonaldsonSeries.build(
            base.manifold, base.w, terms, base.zword, flags if flags is not None else self.flags
        )

    def raw_terms(self) -> List[Tuple[Sector, CohClass, MultiPoly]]:
        return [(t.sector, t.K, t.poly) for t in self.terms]

    def scaled(self, c: Scalar) -> "DonaldsonSeries":
        return self.with_terms([(s, K, p.scale(c)) for s, K, p in self.raw_terms()])

    def __add__(self, other: "DonaldsonSeries") -> "DonaldsonSeries":
        if (self.manifold, self.w, self.zword) != (other.manifold, other.w, other.zword):
            raise DonaldsonValidationError("series belong to different manifolds, w or z")
        flags = SeriesFlags(
            claims_characteristic=self.flags.claims_characteristic
            and other.flags.claims_characteristic
        )
        return self.with_terms(self.raw_terms() + other.raw_terms(), flags)

    def __sub__(self, other: "DonaldsonSeries") -> "DonaldsonSeries":
        return self + other.scaled(-1)


def canonicalize(S: DonaldsonSeries) -> DonaldsonSeries:
    """Re-run the canonical merge, prune and sort."""
    return DonaldsonSeries.build(S.manifold, S.w, S.raw_terms(), S.zword, S.flags)


# expansion

def _quadratic_half(lattice: Lattice, variables: Sequence[str], directions: Sequence[CohClass]) -> MultiPoly:
    """Q(sum_a x_a D_a) / 2 as a polynomial in the x_a."""
    terms: Dict[Tuple[int, ...], GaussianRational] = {}
    n = len(variables)
    for a, Da in enumerate(directions):
        for b, Db in enumerate(directions):
            value = lattice.form(Da, Db)
            if not value:
                continue
            monom = [0] * n
            monom[a] += 1
            monom[b] += 1
            key = tuple(monom)
            terms[key] = terms.get(key, as_gaussian(0)) + gaussian(Fraction(value, 2))
    return MultiPoly.from_terms(variables, terms)


def _linear(variables: Sequence[str], coefficients: Mapping[str, Scalar]) -> MultiPoly:
    result = MultiPoly.zero(variables)
    for name, c in coefficients.items():
        result = result + MultiPoly.variable(variables, name).scale(c)
    return result


def expand_restricted(
    S: DonaldsonSeries,
    directions: Mapping[str, CohClass],
    cutoff: Optional[int] = None,
    lambda_cutoff: Optional[int] = None,
    truncation: Optional[Truncation] = None,
) -> TruncSeries:
    """Expand the series along D = sum_name name * directions[name].

    Each term contributes exp(linear) * p; the terms of a sector are summed
    first and multiplied by the shared factor exp(+-(Q/2 + 2 lam)) once.

    Args:
        S: Structured series
        directions: Ordered mapping of new variable names to homology classes
        cutoff: Total-degree cutoff in the new variables
        lambda_cutoff: Separate cutoff for ``lam``
        truncation: Explicit truncation instead of the two cutoffs, for
            example one with a separate limit per direction

    Returns:
        The generating function G(D, lam) truncated, in variables
        (*directions, "lam")
    """
    names = list(directions)
    if LAMBDA in names:
        raise DonaldsonValidationError(f"{LAMBDA!r} cannot name a direction")
    variables = tuple(names) + (LAMBDA,)
    if truncation is None:
        if cutoff is None or lambda_cutoff is None:
            raise DonaldsonValidationError("give both cutoffs or a truncation")
        if cutoff < 0 or lambda_cutoff < 0:
            raise DonaldsonValidationError("cutoffs must be non-negative")
        truncation = Truncation.of(cutoff, lambda_cutoff=lambda_cutoff)
    elif truncation.total < 0 or any(limit < 0 for _, limit in truncation.separate):
        raise DonaldsonValidationError("cutoffs must be non-negative")
    truncation.admitter(variables)
    lattice = S.lattice
    classes = [lattice.check(directions[n], "direction") for n in names]

    prefactor = _quadratic_half(lattice, variables, classes) + MultiPoly.variable(variables, LAMBDA).scale(2)
    substitution = {
        f"t{j + 1}": {n: D[j] for n, D in zip(names, classes) if D[j]}
        for j in range(lattice.rank)
    }

    def term_series(term: SeriesTerm) -> TruncSeries:
        unit = ONE if term.sector == Sector.PLUS else I
        linear = _linear(variables, {n: unit * lattice.evaluate(term.K, D) for n, D in zip(names, classes)})
        poly = term.poly.compose_linear(variables, substitution)
        return exp_truncated(linear, truncation).mul_poly(poly)

    workers = parallelism()
    if workers > 1 and len(S.terms) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(term_series, S.terms))
    else:
        pieces = [term_series(t) for t in S.terms]

    total = TruncSeries.zero(variables, truncation)
    for sector, sign in ((Sector.PLUS, 1), (Sector.MINUS, -1)):
        part = TruncSeries.zero(variables, truncation)
        for term, piece in zip(S.terms, pieces):
            if term.sector == sector:
                part = part + piece
        if not part.is_zero():
            total = total + mul_exp(part, prefactor.scale(sign))
    return total


def expand(S: DonaldsonSeries, cutoff: int, lambda_cutoff: int) -> TruncSeries:
    """Truncated generating function G(t, lam) in the lattice coordinates."""
    return expand_to(S, Truncation.of(cutoff, lambda_cutoff=lambda_cutoff))


def expand_to(S: DonaldsonSeries, truncation: Truncation) -> TruncSeries:
    """``expand`` under an arbitrary truncation of (t1, ..., tn, lam)."""
    directions = {f"t{j + 1}": CohClass.basis(S.rank, j) for j in range(S.rank)}
    return expand_restricted(S, directions, truncation=truncation)


# symmetry

def _flip(poly: MultiPoly) -> MultiPoly:
    """p(i*t, -lam)."""
    factors: Dict[str, Scalar] = {name: I for name in poly.variables if name != LAMBDA}
    factors[LAMBDA] = -1
    return poly.substitute_scaled(factors)


def symmetrize(S: DonaldsonSeries) -> DonaldsonSeries:
    """Replace the Minus sector by i^(d - d0) p(i t, -lam) of every Plus term.

    Raises:
        ParityError: If d0 - d is not an integer
    """
    factor = i_power(-S.d0_minus_d)
    terms = S.raw_terms()
    plus = [(s, K, p) for s, K, p in terms if s == Sector.PLUS]
    minus = [(Sector.MINUS, K, _flip(p).scale(factor)) for _, K, p in plus]
    flags = replace(S.flags, claims_symmetric=True)
    return S.with_terms(plus + minus, flags)


@dataclass(frozen=True)
class PairReport:
    passed: bool
    violations: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"passed": self.passed, "violations": list(self.violations)}


def check_pair_structure(S: DonaldsonSeries) -> PairReport:
    """Check that Plus classes come in pairs +-K with matching polynomials."""
    violations: List[str] = []
    try:
        sign = -1 if S.d0_minus_d % 2 else 1
    except ParityError as e:
        return PairReport(False, (e.message,))

    negate_t = {name: -1 for name in S.variables if name != LAMBDA}
    for term in S.plus_terms:
        partner = S.term(Sector.PLUS, -term.K)
        if partner is None:
            violations.append(f"class {term.K} has no partner {-term.K}")
            continue
        if partner.poly.substitute_scaled(negate_t) != term.poly.scale(sign):
            violations.append(f"polynomials of {term.K} and {-term.K} do not match")
    return PairReport(not violations, tuple(violations))


def check_symmetry_identity(S: DonaldsonSeries, cutoff: int, lambda_cutoff: int) -> bool:
    """G(i t, -lam) == i^(d0 - d) G(t, lam) coefficientwise."""
    G = expand(S, cutoff, lambda_cutoff)
    factors: Dict[str, Scalar] = {name: I for name in G.variables if name != LAMBDA}
    factors[LAMBDA] = -1
    return G.substitute_scaled(factors) == G.scale(i_power(S.d0_minus_d))


# classes

def basic_classes(S: DonaldsonSeries) -> List[Tuple[CohClass, MultiPoly]]:
    """Plus-sector classes with their polynomials, canonically ordered."""
    return [(t.K, t.poly) for t in S.plus_terms]


def require_sst_shape(S: DonaldsonSeries, operation: str) -> None:
    """Raise NotSimpleTypeError unless every polynomial is a constant."""
    for term in S.terms:
        if not term.poly.is_constant():
            raise NotSimpleTypeError(
                f"{operation} needs constant polynomials; class {term.K} carries {term.poly}",
                {"operation": operation},
            )


def min_genus(S: DonaldsonSeries, surf: CohClass) -> int:
    """Smallest g with 2g - 2 >= surf^2 + max |K . surf|.

    Raises:
        DonaldsonValidationError: If surf is zero or has negative square
        NotSimpleTypeError: If S does not claim strong simple type
    """
    lattice = S.lattice
    lattice.check(surf, "surface")
    if surf.is_zero():
        raise DonaldsonValidationError("surface class must be nonzero")
    s2 = lattice.square(surf)
    if s2 < 0:
        raise DonaldsonValidationError(f"surface square {s2} < 0 gives no bound")
    if not S.flags.claims_sst:
        raise NotSimpleTypeError(
            "min_genus needs a series claiming strong simple type", {"operation": "min_genus"}
        )
    require_sst_shape(S, "min_genus")
    bound = s2 + max((abs(lattice.evaluate(K, surf)) for K, _ in basic_classes(S)), default=0)
    return max(0, (bound + 3) // 2)


# Kronheimer-Mrowka form

def km_sign_exponent(lattice: Lattice, K: CohClass, w: CohClass) -> int:
    """(K.w + w^2) / 2, which must be an integer."""
    value = (lattice.cohomology_pairing(K, w) + lattice.cohomology_square(w)) / 2
    if value.denominator != 1:
        raise ParityError(
            f"(K.w + w^2)/2 = {value} is not an integer for K={K}",
            {"K": K.to_list(), "w": w.to_list()},
        )
    return int(value)


def to_km_form(S: DonaldsonSeries) -> List[Tuple[CohClass, GaussianRational]]:
    """The (K, a) pairs with D^w((1 + x/2) e^(tD)) = e^(Q/2) sum (-1)^(...) a e^K."""
    require_sst_shape(S, "to_km_form")
    result = []
    for term in S.plus_terms:
        sign = -1 if km_sign_exponent(S.lattice, term.K, S.w) % 2 else 1
        result.append((term.K, term.poly.constant_term() * (2 * sign)))
    return result


def from_km_form(
    km: Sequence[Tuple[CohClass, Scalar]],
    manifold: ManifoldData,
    w: CohClass,
    zword: Optional[OneCycleWord] = None,
) -> DonaldsonSeries:
    """Two-sector series whose (1 + x/2)-insertion at lam = 0 gives the KM form."""
    variables = series_variables(manifold.rank)
    terms = []
    for K, a in km:
        manifold.lattice.check(K, "K")
        sign = -1 if km_sign_exponent(manifold.lattice, K, w) % 2 else 1
        coeff = as_gaussian(a) * gaussian(Fraction(sign, 2))
        terms.append((Sector.PLUS, K, MultiPoly.constant(variables, coeff)))
    flags = SeriesFlags(
        claims_characteristic=all(is_characteristic(manifold.lattice, K) for K, _ in km),
        claims_sst=True,
    )
    return symmetrize(DonaldsonSeries.build(manifold, w, terms, zword, flags))


def validate_flags(S: DonaldsonSeries) -> None:
    """Raise FlagViolationError for the first claimed flag that fails."""
    if S.flags.claims_characteristic:
        for term in S.terms:
            if not is_characteristic(S.lattice, term.K):
                raise FlagViolationError(
                    f"class {term.K} is not characteristic", {"flag": "claims_characteristic"}
                )
    if S.flags.claims_sst:
        for term in S.terms:
            if not term.poly.is_constant():
                raise FlagViolationError(
                    f"class {term.K} has non-constant polynomial", {"flag": "claims_sst"}
                )
    if S.flags.claims_symmetric:
        try:
            expected = symmetrize(S)
        except ParityError as e:
            raise FlagViolationError(e.message, {"flag": "claims_symmetric"}) from e
        if expected.minus_terms != S.minus_terms:
            raise FlagViolationError(
                "Minus sector is not the symmetrized Plus sector", {"flag": "claims_symmetric"}
            )
