"""Tests for structured series, expansion and the symmetry rules."""
import random
from fractions import Fraction

import pytest

from algebra.gaussian import I, gaussian
from algebra.poly import LAMBDA, MultiPoly
from algebra.truncated import Truncation, TruncSeries, exp_truncated
from core.errors import (
    DonaldsonValidationError,
    FlagViolationError,
    LatticeError,
    NotSimpleTypeError,
    ParityError,
)
from invariants.series import (
    DonaldsonSeries,
    OneCycleWord,
    Sector,
    SeriesFlags,
    basic_classes,
    canonicalize,
    check_pair_structure,
    check_symmetry_identity,
    expand,
    expand_restricted,
    expand_to,
    from_km_form,
    km_sign_exponent,
    min_genus,
    series_variables,
    symmetrize,
    to_km_form,
    validate_flags,
)
from lattice.forms import CohClass, Lattice, ManifoldData

from conftest import random_sst_series

V2 = series_variables(2)
K = CohClass.of([1, 1])


def const(value, variables=V2):
    return MultiPoly.constant(variables, value)


def flat_manifold():
    return ManifoldData(Lattice(((0,),)), b1=0, bplus=3)


def test_series_variables():
    assert series_variables(3) == ("t1", "t2", "t3", LAMBDA)


def test_one_cycle_word():
    word = OneCycleWord(("delta",))
    assert word.deg2z == 3
    assert word.extended("gamma").labels == ("delta", "gamma")
    assert word.to_dict() == {"labels": ["delta"], "deg2z": 3}
    with pytest.raises(DonaldsonValidationError):
        OneCycleWord(("delta",), deg2z=2)
    with pytest.raises(DonaldsonValidationError):
        OneCycleWord(("delta", "delta"))
    with pytest.raises(DonaldsonValidationError):
        word.extended("delta")


def test_two_class_fixture_structure(two_class):
    assert two_class.d0 == Fraction(-6)
    assert two_class.d0_minus_d == -6
    assert [t.K for t in two_class.plus_terms] == [-K, K]
    for term in two_class.plus_terms:
        assert term.poly == const(Fraction(1, 2))
    for term in two_class.minus_terms:
        assert term.poly == const(Fraction(-1, 2))
    assert two_class.flags == SeriesFlags(True, True, True)
    validate_flags(two_class)


def test_build_merges_and_prunes(two_class_manifold):
    w = CohClass.of([1, 1])
    S = DonaldsonSeries.build(
        two_class_manifold,
        w,
        [
            (Sector.PLUS, K, const(1)),
            (Sector.PLUS, K, const(2)),
            (Sector.PLUS, -K, const(1)),
            (Sector.PLUS, -K, const(-1)),
        ],
    )
    assert len(S.terms) == 1
    assert S.term(Sector.PLUS, K).poly == const(3)
    assert S.term(Sector.PLUS, -K) is None


def test_constructor_rejects_bad_terms(two_class_manifold, two_class):
    w = CohClass.of([1, 1])
    with pytest.raises(DonaldsonValidationError):
        DonaldsonSeries(two_class_manifold, w, terms=two_class.terms + two_class.terms[:1])
    with pytest.raises(LatticeError):
        DonaldsonSeries.build(two_class_manifold, w, [(Sector.PLUS, CohClass.of([1]), const(1))])
    with pytest.raises(DonaldsonValidationError):
        DonaldsonSeries.build(two_class_manifold, w, [(Sector.PLUS, K, const(1, series_variables(1)))])


def test_canonicalize_is_idempotent_and_order_free(two_class_manifold):
    w = CohClass.of([1, 1])
    raw = [(Sector.MINUS, K, const(2)), (Sector.PLUS, -K, const(1)), (Sector.PLUS, K, const(1))]
    S = DonaldsonSeries.build(two_class_manifold, w, raw)
    assert DonaldsonSeries.build(two_class_manifold, w, list(reversed(raw))) == S
    assert canonicalize(canonicalize(S)) == canonicalize(S)
    assert [t.sector for t in S.terms] == [Sector.PLUS, Sector.PLUS, Sector.MINUS]
    assert basic_classes(S) == basic_classes(canonicalize(S))


def test_add_and_sub(two_class):
    doubled = two_class + two_class
    assert doubled.raw_terms() == two_class.scaled(2).raw_terms()
    assert doubled.flags == SeriesFlags(claims_characteristic=True)
    assert (two_class - two_class).is_zero()


def test_add_rejects_other_manifold(two_class, hyperbolic):
    with pytest.raises(DonaldsonValidationError):
        two_class + hyperbolic


def test_expand_flat_plus_constant():
    variables = series_variables(1)
    S = DonaldsonSeries.build(flat_manifold(), CohClass.of([0]), [(Sector.PLUS, CohClass.of([0]), const(1, variables))])
    G = expand(S, 0, 2)
    assert G.to_poly() == MultiPoly.from_terms(variables, {(0, 0): 1, (0, 1): 2, (0, 2): 2})


def test_expand_flat_plus_class():
    variables = series_variables(1)
    S = DonaldsonSeries.build(flat_manifold(), CohClass.of([0]), [(Sector.PLUS, CohClass.of([1]), const(1, variables))])
    G = expand(S, 3, 0)
    assert G.to_poly() == MultiPoly.from_terms(
        variables, {(0, 0): 1, (1, 0): 1, (2, 0): Fraction(1, 2), (3, 0): Fraction(1, 6)}
    )


def test_expand_flat_minus_class():
    variables = series_variables(1)
    S = DonaldsonSeries.build(flat_manifold(), CohClass.of([0]), [(Sector.MINUS, CohClass.of([1]), const(1, variables))])
    G = expand(S, 2, 0)
    assert G.to_poly() == MultiPoly.from_terms(variables, {(0, 0): 1, (1, 0): I, (2, 0): Fraction(-1, 2)})


def test_expand_two_class_coefficients(two_class):
    G = expand(two_class, 4, 2)
    assert G.truncation == Truncation.of(4, lambda_cutoff=2)
    assert G.coefficient((0, 0, 0)) == gaussian(0)
    assert G.coefficient((1, 0, 0)) == gaussian(0)
    assert G.coefficient((0, 0, 1)) == gaussian(4)
    assert G.coefficient((2, 0, 0)) == gaussian(2)


def test_expand_is_additive(two_class, lambda_squared):
    assert expand(two_class + lambda_squared, 5, 3) == expand(two_class, 5, 3) + expand(lambda_squared, 5, 3)


def test_expand_restricted_matches_substitution(two_class):
    G = expand(two_class, 6, 2)
    along = expand_restricted(two_class, {"t": CohClass.of([1, 1])}, 6, 2)
    composed = G.to_poly().compose_linear(("t", LAMBDA), {"t1": {"t": 1}, "t2": {"t": 1}})
    assert along == TruncSeries.from_poly(composed, Truncation.of(6, lambda_cutoff=2))


def test_expand_restricted_validation(two_class):
    with pytest.raises(DonaldsonValidationError):
        expand_restricted(two_class, {LAMBDA: K}, 4, 1)
    with pytest.raises(DonaldsonValidationError):
        expand(two_class, -1, 1)
    with pytest.raises(DonaldsonValidationError):
        expand_restricted(two_class, {"t": CohClass.of([1, 0])}, 4)


def test_expand_to_a_box_restricts_the_total_expansion(two_class, lambda_squared):
    box = Truncation(7, (("t1", 3), ("t2", 4), (LAMBDA, 2)))
    for S in (two_class, lambda_squared):
        assert expand_to(S, Truncation.of(5, lambda_cutoff=2)) == expand(S, 5, 2)
        assert expand_to(S, box) == TruncSeries.from_poly(expand(S, 7, 2).to_poly(), box)


def test_expand_agrees_with_term_by_term_exponentials():
    rng = random.Random(31)
    for _ in range(5):
        S = random_sst_series(rng, rank=2)
        trunc = Truncation.of(5, lambda_cutoff=2)
        t1, t2, lam = (MultiPoly.variable(V2, n) for n in V2)
        half_q = (t1 * t1).scale(gaussian(S.lattice.gram[0][0]) / 2) + (t2 * t2).scale(gaussian(S.lattice.gram[1][1]) / 2)
        expected = TruncSeries.zero(V2, trunc)
        for term in S.terms:
            unit, sign = (1, 1) if term.sector == Sector.PLUS else (I, -1)
            exponent = (half_q + lam.scale(2)).scale(sign) + t1.scale(unit * term.K[0]) + t2.scale(unit * term.K[1])
            expected = expected + exp_truncated(exponent, trunc).mul_poly(term.poly)
        assert expand(S, 5, 2) == expected


def test_symmetrize_constant_and_linear():
    manifold = ManifoldData(Lattice.diagonal([1, -1]), b1=0, bplus=7)
    w = CohClass.of([0, 0])
    t1 = MultiPoly.variable(V2, "t1")
    S = DonaldsonSeries.build(manifold, w, [(Sector.PLUS, K, const(1)), (Sector.PLUS, -K, t1)])
    assert S.d0_minus_d % 4 == 0
    sym = symmetrize(S)
    assert sym.term(Sector.MINUS, K).poly == const(1)
    assert sym.term(Sector.MINUS, -K).poly == t1.scale(I)
    assert sym.flags.claims_symmetric


def test_symmetrize_lambda_with_residue_two(two_class_manifold):
    lam = MultiPoly.variable(V2, LAMBDA)
    S = DonaldsonSeries.build(two_class_manifold, K, [(Sector.PLUS, K, lam)])
    assert S.d0_minus_d % 4 == 2
    assert symmetrize(S).term(Sector.MINUS, K).poly == lam


def test_symmetrize_is_idempotent(two_class, lambda_squared):
    assert symmetrize(two_class) == two_class
    assert symmetrize(symmetrize(lambda_squared)) == symmetrize(lambda_squared)


def test_symmetrize_parity_error():
    manifold = ManifoldData(Lattice.diagonal([1, -1]), b1=0, bplus=2)
    S = DonaldsonSeries.build(manifold, CohClass.of([0, 0]), [(Sector.PLUS, K, const(1))])
    with pytest.raises(ParityError):
        symmetrize(S)


def test_pair_structure(two_class_manifold):
    t1 = MultiPoly.variable(V2, "t1")

    def report(p_plus, p_minus):
        S = DonaldsonSeries.build(two_class_manifold, K, [(Sector.PLUS, K, p_plus), (Sector.PLUS, -K, p_minus)])
        return check_pair_structure(S)

    assert report(const(1), const(1)).passed
    assert not report(const(1), const(-1)).passed
    assert report(t1, -t1).passed

    lone = DonaldsonSeries.build(two_class_manifold, K, [(Sector.PLUS, K, const(1))])
    result = check_pair_structure(lone)
    assert not result.passed
    assert "no partner" in result.violations[0]


def test_symmetry_identity_holds_on_fixtures(two_class, lambda_squared, hyperbolic):
    for S in (two_class, lambda_squared, hyperbolic):
        assert check_symmetry_identity(S, 6, 3)


def test_symmetry_identity_needs_pairs(two_class_manifold):
    lone = symmetrize(DonaldsonSeries.build(two_class_manifold, K, [(Sector.PLUS, K, const(1))]))
    assert not check_symmetry_identity(lone, 4, 1)


def test_min_genus(two_class, hyperbolic, lambda_squared):
    assert min_genus(two_class, CohClass.of([1, 0])) == 2
    assert min_genus(two_class, CohClass.of([1, 1])) == 2
    # 2g - 2 >= 1 + 3
    three = from_km_form([(CohClass.of([3, 1]), 1), (CohClass.of([-3, -1]), 1)], two_class.manifold, K)
    assert min_genus(three, CohClass.of([1, 0])) == 3

    only_zero = from_km_form([(CohClass.of([0, 0]), 1)], hyperbolic.manifold, CohClass.of([0, 0]))
    assert min_genus(only_zero, CohClass.of([1, 1])) == 2
    empty = hyperbolic.with_terms([])
    assert min_genus(empty, CohClass.of([1, 0])) == 1

    with pytest.raises(DonaldsonValidationError):
        min_genus(two_class, CohClass.of([0, 1]))
    with pytest.raises(DonaldsonValidationError):
        min_genus(two_class, CohClass.of([0, 0]))
    with pytest.raises(NotSimpleTypeError):
        min_genus(lambda_squared, CohClass.of([1, 0]))
    unclaimed = two_class.with_terms(two_class.raw_terms(), SeriesFlags())
    with pytest.raises(NotSimpleTypeError):
        min_genus(unclaimed, CohClass.of([1, 0]))


def test_km_form_of_two_class(two_class):
    assert to_km_form(two_class) == [(-K, gaussian(1)), (K, gaussian(1))]


def test_km_sign_exponent():
    lattice = Lattice.diagonal([1, -1])
    assert km_sign_exponent(lattice, K, CohClass.of([1, 0])) == 1
    with pytest.raises(ParityError):
        km_sign_exponent(lattice, CohClass.of([1, 0]), CohClass.of([0, 1]))


def test_from_km_form_single_zero_class(hyperbolic):
    zero = CohClass.of([0, 0])
    S = from_km_form([(zero, 1)], hyperbolic.manifold, zero)
    assert S.term(Sector.PLUS, zero).poly == const(Fraction(1, 2))
    # i^(-d0) with d0 = -6
    assert S.term(Sector.MINUS, zero).poly == const(Fraction(-1, 2))


def test_km_form_round_trip_on_random_series():
    rng = random.Random(11)
    for _ in range(10):
        S = random_sst_series(rng)
        assert from_km_form(to_km_form(S), S.manifold, S.w) == S


def test_to_km_form_rejects_non_constant(lambda_squared):
    with pytest.raises(NotSimpleTypeError):
        to_km_form(lambda_squared)


def test_validate_flags(two_class_manifold, two_class):
    t1 = MultiPoly.variable(V2, "t1")
    S = DonaldsonSeries.build(two_class_manifold, K, [(Sector.PLUS, K, t1)], flags=SeriesFlags(claims_sst=True))
    with pytest.raises(FlagViolationError):
        validate_flags(S)

    bad_class = CohClass.of([1, 0])
    S = DonaldsonSeries.build(
        two_class_manifold, K, [(Sector.PLUS, bad_class, const(1))], flags=SeriesFlags(claims_characteristic=True)
    )
    with pytest.raises(FlagViolationError):
        validate_flags(S)

    broken = two_class.with_terms([(t.sector, t.K, t.poly) for t in two_class.plus_terms])
    with pytest.raises(FlagViolationError):
        validate_flags(broken)
