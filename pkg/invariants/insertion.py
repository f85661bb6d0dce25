"""Insertions of point and surface classes into structured series.

Each insertion acts on the generating function as a derivative (d/dlam for
the point class, a directional derivative in t for a surface class) and is
written back into structured form term by term. The reduced surface
insertion drops the +-Q(t, v) term coming from the sector prefactor.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

from algebra.gaussian import ONE, I, GaussianRational, Scalar, as_gaussian
from algebra.poly import LAMBDA, MultiPoly
from core.errors import DonaldsonValidationError, InconsistencyError, NotBasicClassError
from invariants.series import DonaldsonSeries, Sector, SeriesFlags, basic_classes
from lattice.forms import CohClass


class InsertionMode(str, Enum):
    RAW = "raw"
    REDUCED = "reduced"


@dataclass(frozen=True)
class PointShift:
    """The factor (x - c)^power."""

    c: GaussianRational
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c", as_gaussian(self.c))
        if self.power < 1:
            raise DonaldsonValidationError("factor powers must be at least 1")


@dataclass(frozen=True)
class SurfaceShift:
    """The factor (v - c)^power for a surface class v."""

    v: CohClass
    c: GaussianRational
    mode: InsertionMode = InsertionMode.REDUCED
    power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c", as_gaussian(self.c))
        object.__setattr__(self, "mode", InsertionMode(self.mode))
        if self.power < 1:
            raise DonaldsonValidationError("factor powers must be at least 1")


Factor = Union[PointShift, SurfaceShift]


@dataclass(frozen=True)
class EvenElement:
    """A product of shifted insertions followed by a scalar."""

    factors: Tuple[Factor, ...] = ()
    scale: GaussianRational = ONE

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "scale", as_gaussian(self.scale))
        if not self.scale:
            raise DonaldsonValidationError("even element scale must be nonzero")

    def then(self, factor: Factor) -> "EvenElement":
        return EvenElement(self.factors + (factor,), self.scale)

    def scaled(self, c: Scalar) -> "EvenElement":
        return EvenElement(self.factors, self.scale * as_gaussian(c))


def _insertion_flags(S: DonaldsonSeries) -> SeriesFlags:
    # the result belongs to another even insertion, so only the class claim survives
    return SeriesFlags(claims_characteristic=S.flags.claims_characteristic)


def insert_point(S: DonaldsonSeries) -> DonaldsonSeries:
    """Plus p -> 2p + dp/dlam; Minus q -> -2q + dq/dlam."""
    terms = []
    for sector, K, p in S.raw_terms():
        eigen = 2 if sector == Sector.PLUS else -2
        terms.append((sector, K, p.scale(eigen) + p.diff(LAMBDA)))
    return S.with_terms(terms, _insertion_flags(S))


def _q_linear(S: DonaldsonSeries, v: CohClass) -> MultiPoly:
    """Q(t., v) = sum_j t_j (e_j . v)."""
    dual = S.lattice.poincare_dual(v)
    variables = S.variables
    result = MultiPoly.zero(variables)
    for j, c in enumerate(dual):
        if c:
            result = result + MultiPoly.variable(variables, f"t{j + 1}").scale(c)
    return result


def insert_surface(
    S: DonaldsonSeries, v: CohClass, mode: InsertionMode = InsertionMode.RAW
) -> DonaldsonSeries:
    """Insert a surface class v.

    Raw Plus terms become (Q(t., v) + K.v) p + grad_v p and raw Minus terms
    (-Q(t., v) + i K.v) q + grad_v q. Reduced mode drops the Q summand.
    """
    S.lattice.check(v, "surface class")
    mode = InsertionMode(mode)
    variables = S.variables
    q_lin = _q_linear(S, v) if mode == InsertionMode.RAW else MultiPoly.zero(variables)
    direction = {f"t{j + 1}": c for j, c in enumerate(v) if c}

    terms = []
    for sector, K, p in S.raw_terms():
        kv = S.lattice.evaluate(K, v)
        if sector == Sector.PLUS:
            multiplier = q_lin + MultiPoly.constant(variables, kv)
        else:
            multiplier = -q_lin + MultiPoly.constant(variables, I * kv)
        terms.append((sector, K, multiplier * p + p.directional(direction)))
    return S.with_terms(terms, _insertion_flags(S))


def _apply_factor(S: DonaldsonSeries, factor: Factor) -> DonaldsonSeries:
    for _ in range(factor.power):
        if S.is_zero():
            return S
        if isinstance(factor, PointShift):
            moved = insert_point(S)
        else:
            moved = insert_surface(S, factor.v, factor.mode)
        S = moved - S.scaled(factor.c)
    return S


def apply_even(S: DonaldsonSeries, e: EvenElement) -> DonaldsonSeries:
    """Apply the factors left to right, then multiply by the scale."""
    result = S
    for factor in e.factors:
        if isinstance(factor, SurfaceShift):
            S.lattice.check(factor.v, "surface class")
        result = _apply_factor(result, factor)
    if e.factors:
        result = result.with_terms(result.raw_terms(), _insertion_flags(S))
    return result.scaled(e.scale) if e.scale != ONE else result


def simple_type_operator(S: DonaldsonSeries) -> DonaldsonSeries:
    """(x^2 - 4) applied through two point insertions."""
    return insert_point(insert_point(S)) - S.scaled(4)


def finite_type_order_closed_form(S: DonaldsonSeries) -> int:
    """1 + max lambda-degree over all terms (0 for the zero series)."""
    if S.is_zero():
        return 0
    return 1 + max(t.poly.degree(LAMBDA) for t in S.terms)


def finite_type_order(S: DonaldsonSeries) -> int:
    """Least n with (x^2 - 4)^n S = 0, found by applying the operator.

    Raises:
        InconsistencyError: If the operator count disagrees with the
            lambda-degree shortcut
    """
    expected = finite_type_order_closed_form(S)
    current, n = S, 0
    while not current.is_zero():
        if n > expected:
            break
        current = simple_type_operator(current)
        n += 1
    if n != expected or not current.is_zero():
        raise InconsistencyError(
            "finite type order disagrees with the lambda-degree shortcut",
            {"applied": n, "closed_form": expected},
        )
    return n


def is_sst_shape(S: DonaldsonSeries) -> bool:
    """Order at most one and no unresolved H1 insertions."""
    if finite_type_order(S) > 1:
        return False
    return not S.zword.labels or S.flags.claims_sst


def km_insertion(S: DonaldsonSeries) -> DonaldsonSeries:
    """(1 + x/2) insertion restricted to lam = 0."""
    inserted = S + insert_point(S).scaled(ONE / 2)
    return inserted.with_terms([(s, K, p.at_zero(LAMBDA)) for s, K, p in inserted.raw_terms()])


def isolating_element(S: DonaldsonSeries, K: CohClass) -> EvenElement:
    """Even element mapping S to the single term (Plus, K, 1).

    Point shifts by -2 kill the Minus sector, reduced (D_j - beta) shifts
    remove every other Plus class, and reduced (D_j - K_j) and (x - 2)
    shifts differentiate the remaining polynomial down to a constant.

    Raises:
        NotBasicClassError: If K is not a basic class of S
    """
    S.lattice.check(K, "K")
    classes = [c for c, _ in basic_classes(S)]
    if K not in classes:
        raise NotBasicClassError(f"{K} is not a basic class", {"K": K.to_list()})

    factors: List[Factor] = []
    if S.minus_terms:
        depth = 1 + max(t.poly.degree(LAMBDA) for t in S.minus_terms)
        factors.append(PointShift(-2, depth))

    power = 1 + max(
        t.poly.degree(name) for t in S.plus_terms for name in S.variables if name != LAMBDA
    )
    for j in range(S.rank):
        basis = CohClass.basis(S.rank, j)
        for beta in sorted({c[j] for c in classes if c != K} - {K[j]}):
            factors.append(SurfaceShift(basis, beta, InsertionMode.REDUCED, power))

    isolated = apply_even(S, EvenElement(tuple(factors)))
    if len(isolated.terms) != 1 or isolated.terms[0].K != K or isolated.terms[0].sector != Sector.PLUS:
        raise InconsistencyError(f"could not isolate class {K}", {"K": K.to_list()})

    poly = isolated.terms[0].poly
    top = max(poly.element.keys())
    for j, e in enumerate(top[:-1]):
        if e:
            factors.append(SurfaceShift(CohClass.basis(S.rank, j), K[j], InsertionMode.REDUCED, e))
    if top[-1]:
        factors.append(PointShift(2, top[-1]))

    normalized = apply_even(S, EvenElement(tuple(factors)))
    if len(normalized.terms) != 1 or not normalized.terms[0].poly.is_constant():
        raise InconsistencyError(f"could not normalize class {K}", {"K": K.to_list()})
    return EvenElement(tuple(factors), ONE / normalized.terms[0].poly.constant_term())
