"""Tests for blow-up, blow-down, recoloring and the S1xS3 sum."""
import random
from fractions import Fraction

import pytest

from algebra.gaussian import I, gaussian
from algebra.poly import LAMBDA, MultiPoly
from algebra.truncated import Truncation, TruncSeries, exp_truncated
from commands.catalog import FixtureCatalog
from core.errors import DonaldsonValidationError, LatticeError, NotSimpleTypeError
from invariants.series import (
    Sector,
    basic_classes,
    check_pair_structure,
    check_symmetry_identity,
    expand,
    from_km_form,
    series_variables,
    validate_flags,
)
from invariants.transforms import (
    BlowupMap,
    BlowupVariant,
    blow_down_derivative,
    blow_up,
    connect_sum_s1s3,
    recolor,
    twist_by_even,
)
from lattice.forms import CohClass, Lattice

from conftest import random_sst_series

K = CohClass.of([1, 1])
CUTOFF, LAMBDA_CUTOFF = 8, 1


def sector_only(S, sector):
    return S.with_terms([(s, c, p) for s, c, p in S.raw_terms() if s == sector])


def lifted(G, rank):
    """Series in t1..tn, lam viewed in t1..t(n+1), lam."""
    variables = series_variables(rank + 1)
    poly = G.to_poly().remap(variables, list(range(rank)) + [rank + 1])
    return TruncSeries.from_poly(poly, Truncation.of(CUTOFF, lambda_cutoff=LAMBDA_CUTOFF))


def exceptional_factor(rank, quadratic, linear, subtract=False):
    """(exp(q t^2 + l t) +- exp(q t^2 - l t)) / 2 in the new variable."""
    variables = series_variables(rank + 1)
    t = MultiPoly.variable(variables, f"t{rank + 1}")
    trunc = Truncation.of(CUTOFF, lambda_cutoff=LAMBDA_CUTOFF)
    square = (t * t).scale(quadratic)
    first = exp_truncated(square + t.scale(linear), trunc)
    second = exp_truncated(square - t.scale(linear), trunc)
    return (first - second if subtract else first + second).scale(Fraction(1, 2))


def test_blowup_map(two_class_manifold):
    bmap = BlowupMap.of(two_class_manifold.lattice)
    assert bmap.target.labels == ("h", "e", "E")
    assert bmap.target.gram == ((1, 0, 0), (0, -1, 0), (0, 0, -1))
    assert bmap.exceptional == CohClass.of([0, 0, -1])
    assert bmap.index == 2


def test_blowup_cosh_classes(two_class):
    blown = blow_up(two_class, BlowupVariant.COSH)
    quarter = MultiPoly.constant(series_variables(3), Fraction(1, 4))
    assert [(c.coords, p) for c, p in basic_classes(blown)] == [
        ((-1, -1, -1), quarter),
        ((-1, -1, 1), quarter),
        ((1, 1, -1), quarter),
        ((1, 1, 1), quarter),
    ]
    assert blown.w == CohClass.of([1, 1, 0])
    assert blown.manifold.name == "X#-CP2"
    validate_flags(blown)
    assert check_pair_structure(blown).passed


def test_blowup_sinh_signs(two_class):
    blown = blow_up(two_class, "sinh")
    assert blown.w == CohClass.of([1, 1, -1])
    E = CohClass.of([0, 0, -1])
    K3 = K.extended(0)
    assert blown.term(Sector.PLUS, K3 + E).poly.constant_term() == gaussian(Fraction(-1, 4))
    assert blown.term(Sector.PLUS, K3 - E).poly.constant_term() == gaussian(Fraction(1, 4))
    assert blown.d0 == two_class.d0 + 1
    validate_flags(blown)


def test_blowup_of_zero_and_non_sst(two_class, lambda_squared):
    assert blow_up(two_class.with_terms([])).is_zero()
    with pytest.raises(NotSimpleTypeError):
        blow_up(lambda_squared)


@pytest.mark.parametrize(
    "variant, plus_factor, minus_factor",
    [
        # e^(-s^2/2) cosh(s) and e^(s^2/2) cos(s)
        ("cosh", (Fraction(-1, 2), 1, False), (Fraction(1, 2), I, False)),
        # e^(-s^2/2) sinh(s) and e^(s^2/2) sin(s) = -i e^(s^2/2) (e^(is) - e^(-is)) / 2
        ("sinh", (Fraction(-1, 2), 1, True), (Fraction(1, 2), I, True)),
    ],
)
def test_blowup_expansion_identity(two_class, variant, plus_factor, minus_factor):
    blown = blow_up(two_class, variant)
    for sector, (q, l, odd) in ((Sector.PLUS, plus_factor), (Sector.MINUS, minus_factor)):
        factor = exceptional_factor(2, q, l, subtract=odd)
        if sector == Sector.MINUS and odd:
            factor = factor.scale(-I)
        before = lifted(expand(sector_only(two_class, sector), CUTOFF, LAMBDA_CUTOFF), 2)
        after = expand(sector_only(blown, sector), CUTOFF, LAMBDA_CUTOFF)
        assert after == before * factor


def random_class(rng, rank, bound=2):
    return CohClass.of([rng.randint(-bound, bound) for _ in range(rank)])


def test_blowdown_inverts_sinh_blowup():
    rng = random.Random(5)
    for _ in range(20):
        S = random_sst_series(rng)
        assert blow_down_derivative(blow_up(S, BlowupVariant.SINH)) == S


def test_blowdown_inverts_sinh_blowup_on_catalog(config_loader):
    catalog = FixtureCatalog(config_loader)
    fixtures = [catalog.get(name) for name in catalog.names()]
    simple = [S for S in fixtures if S.flags.claims_sst]
    assert len(simple) >= 4
    for S in simple:
        back = blow_down_derivative(blow_up(S, BlowupVariant.SINH))
        assert back.terms == S.terms, S.manifold.name
        assert (back.w, back.lattice, back.zword) == (S.w, S.lattice, S.zword)


def test_blowdown_of_cosh_blowup_vanishes(two_class):
    assert blow_down_derivative(blow_up(two_class, BlowupVariant.COSH)).is_zero()


def test_blowdown_rejects_non_exceptional(two_class):
    with pytest.raises(LatticeError):
        blow_down_derivative(two_class, 0)
    with pytest.raises(LatticeError):
        blow_down_derivative(two_class, 5)


def test_recolor_involution(two_class):
    w_new = CohClass.of([1, 0])
    once = recolor(two_class, w_new)
    assert once.w == w_new
    assert recolor(once, two_class.w) == two_class
    assert [c for c, _ in basic_classes(once)] == [c for c, _ in basic_classes(two_class)]


def test_recolor_is_an_involution_on_random_series():
    rng = random.Random(8)
    for _ in range(20):
        S = random_sst_series(rng)
        w_new = random_class(rng, S.rank)
        assert recolor(recolor(S, w_new), S.w) == S


def test_twist_agrees_with_recolor_on_random_series():
    rng = random.Random(9)
    for _ in range(20):
        S = random_sst_series(rng)
        alpha = random_class(rng, S.rank)
        assert twist_by_even(S, alpha) == recolor(S, S.w + 2 * alpha)


def test_recolor_sign_factor(two_class_manifold):
    S = from_km_form([(K, 1), (-K, 1)], two_class_manifold, CohClass.of([1, 0]))
    recolored = recolor(S, CohClass.of([0, 1]))
    assert [t.poly for t in recolored.plus_terms] == [t.poly for t in S.plus_terms]
    validate_flags(recolored)
    assert check_symmetry_identity(recolored, 4, 1)


@pytest.mark.parametrize("alpha", [[1, 0], [1, 1], [0, 2]])
def test_twist_agrees_with_recolor(two_class, alpha):
    alpha = CohClass.of(alpha)
    assert twist_by_even(two_class, alpha) == recolor(two_class, two_class.w + 2 * alpha)


def test_twist_sign(two_class):
    twisted = twist_by_even(two_class, CohClass.of([1, 0]))
    assert twisted.w == CohClass.of([3, 1])
    for before, after in zip(two_class.terms, twisted.terms):
        assert after.poly == -before.poly


def test_recolor_rejects_non_sst(lambda_squared):
    with pytest.raises(NotSimpleTypeError):
        recolor(lambda_squared, CohClass.of([1, 0]))


def test_connect_sum(two_class):
    summed = connect_sum_s1s3(two_class, "delta")
    assert summed.raw_terms() == two_class.raw_terms()
    assert summed.zword.labels == ("delta",)
    assert summed.zword.deg2z == 3
    assert summed.manifold.b1 == 1
    assert summed.manifold.strong_simple_type is False
    assert summed.d0 == Fraction(-9, 2)
    assert summed.d0_minus_d == two_class.d0_minus_d
    assert basic_classes(summed) == basic_classes(two_class)

    twice = connect_sum_s1s3(summed, "gamma")
    assert twice.zword.labels == ("delta", "gamma")
    assert twice.manifold.b1 == 2

    with pytest.raises(DonaldsonValidationError):
        connect_sum_s1s3(summed, "delta")
    with pytest.raises(DonaldsonValidationError):
        connect_sum_s1s3(two_class, "")


def test_blowup_keeps_lambda_variable_last(two_class):
    blown = blow_up(two_class)
    assert blown.variables == ("t1", "t2", "t3", LAMBDA)
    assert Lattice.diagonal([1, -1, -1], ["h", "e", "E"]) == blown.lattice
