"""Tests for exponential-sum fitting and structure recovery."""
import random
import time

import pytest

from algebra.gaussian import I, gaussian
from algebra.poly import MultiPoly
from algebra.truncated import Truncation, TruncSeries, exp_truncated
from core.errors import (
    DonaldsonValidationError,
    FitInconsistencyError,
    FrequencyError,
    InsufficientDepthError,
    VariableMismatchError,
)
from core.events import EventDispatcher, EventType
from fitting.structfit import (
    FitProblem,
    detect_frequencies,
    fit_exponential_sum,
    recover_structure,
    required_cutoff,
    required_truncation,
    separate_sectors,
)
from invariants.series import (
    DonaldsonSeries,
    Sector,
    SeriesFlags,
    canonicalize,
    expand,
    expand_to,
    series_variables,
)
from lattice.forms import CohClass, Lattice, ManifoldData

from conftest import random_characteristic, random_lattice, random_sst_series

S_ONLY = ("s",)


def s_exp(mu, cutoff):
    s = MultiPoly.variable(S_ONLY, "s")
    return exp_truncated(s.scale(mu), Truncation(cutoff))


def unflagged(S):
    return S.with_terms(S.raw_terms(), SeriesFlags())


def test_fit_cosh():
    F = s_exp(2, 5) + s_exp(-2, 5)
    spectrum = ((-2, 2), (0, 2), (2, 2))
    fit = fit_exponential_sum(FitProblem(F, "s", spectrum))
    one = MultiPoly.constant(S_ONLY, 1)
    assert fit.polynomials() == [one, MultiPoly.zero(S_ONLY), one]


def test_fit_confluent_imaginary():
    s = MultiPoly.variable(S_ONLY, "s")
    F = s_exp(2 * I, 3).mul_poly(s)
    fit = fit_exponential_sum(FitProblem(F, "s", ((2 * I, 2),)))
    assert fit.polynomial(0) == s


def test_fit_reports_first_failing_coefficient():
    with pytest.raises(FitInconsistencyError) as excinfo:
        fit_exponential_sum(FitProblem(s_exp(1, 4), "s", ((0, 1),)))
    assert excinfo.value.index == 1
    assert excinfo.value.details["index"] == 1


def test_fit_checks_every_extra_row():
    # e^(3s) agrees with e^(2s) + s e^(2s) through s^1 only
    with pytest.raises(FitInconsistencyError) as excinfo:
        fit_exponential_sum(FitProblem(s_exp(3, 6), "s", ((2, 2),)))
    assert excinfo.value.index == 2


def test_fit_needs_depth():
    with pytest.raises(InsufficientDepthError):
        fit_exponential_sum(FitProblem(s_exp(1, 1), "s", ((-1, 1), (0, 1), (1, 1))))


def test_fit_problem_validation():
    F = s_exp(1, 4)
    with pytest.raises(DonaldsonValidationError):
        FitProblem(F, "s", ())
    with pytest.raises(DonaldsonValidationError):
        FitProblem(F, "s", ((1, 1), (1, 2)))
    with pytest.raises(DonaldsonValidationError):
        FitProblem(F, "s", ((1, 0),))
    with pytest.raises(VariableMismatchError):
        FitProblem(F, "t", ((1, 1),))


def test_detect_frequencies_cosh():
    F = s_exp(2, 8) + s_exp(-2, 8)
    assert set(detect_frequencies(F, 2)) == {(gaussian(2), 1), (gaussian(-2), 1)}


def test_detect_frequencies_polynomial():
    F = TruncSeries.from_terms(S_ONLY, {(0,): 1, (1,): 1}, Truncation(8))
    assert detect_frequencies(F, 1) == [(gaussian(0), 2)]


def test_detect_frequencies_negation():
    F = s_exp(2, 8) + s_exp(-1, 8).scale(3)
    flipped = F.substitute_scaled({"s": -1})
    found = set(detect_frequencies(F, 2))
    assert found == {(gaussian(2), 1), (gaussian(-1), 1)}
    assert set(detect_frequencies(flipped, 2)) == {(-mu, n) for mu, n in found}


def test_detect_frequencies_errors():
    with pytest.raises(FrequencyError):
        detect_frequencies(s_exp(3, 8), 2)
    with pytest.raises(InsufficientDepthError):
        detect_frequencies(s_exp(2, 2) + s_exp(-2, 2), 2)
    with pytest.raises(VariableMismatchError):
        detect_frequencies(s_exp(2, 4), 2, variable="t")


def test_detect_frequencies_of_fixture_direction(two_class):
    # divide out e^(t1^2/2); along t1 the rest is cosh(t1)
    G = expand(two_class, 12, 0)
    plus_only = two_class.with_terms([(s, K, p) for s, K, p in two_class.raw_terms() if s == Sector.PLUS])
    t1 = MultiPoly.variable(series_variables(2), "t1")
    stripped = expand(plus_only, 12, 0) * exp_truncated((t1 * t1).scale(gaussian(-1) / 2), G.truncation)
    assert set(detect_frequencies(stripped, 2, "real", variable="t1")) == {(gaussian(1), 1), (gaussian(-1), 1)}


def test_required_cutoff():
    assert required_cutoff([1, 1], 0, 0) == (4, 1)
    assert required_cutoff([2], 1, 1) == (9, 3)


def test_required_truncation():
    box = required_truncation([1, 3], 1, 2)
    assert box.to_dict() == {"total": 18, "lam": 5, "t1": 5, "t2": 13}
    total, lam = required_cutoff([1, 3], 1, 2)
    assert Truncation.of(total, lambda_cutoff=lam).covers(box, series_variables(2))
    assert not Truncation.of(total - 1, lambda_cutoff=lam).covers(box, series_variables(2))


def test_separate_sectors(two_class):
    G = expand(two_class, 4, 3)
    A, B = separate_sectors(G, 0)
    plus = two_class.with_terms([t for t in two_class.raw_terms() if t[0] == Sector.PLUS])
    minus = two_class.with_terms([t for t in two_class.raw_terms() if t[0] == Sector.MINUS])
    assert A == expand(plus, 4, 0)
    assert B == expand(minus, 4, 0)


def test_recover_two_class(two_class):
    G = expand(two_class, 4, 1)
    assert recover_structure(G, two_class.manifold, two_class.w, 1) == unflagged(two_class)


def test_recover_zero(two_class_manifold):
    variables = series_variables(2)
    G = TruncSeries.zero(variables, Truncation.of(4, lambda_cutoff=1))
    assert recover_structure(G, two_class_manifold, CohClass.of([1, 1]), 1).is_zero()


def test_recover_random_simple_type_series():
    rng = random.Random(2024)
    for _ in range(6):
        S = random_sst_series(rng, rank=2)
        bounds = [max(abs(t.K[j]) for t in S.terms) for j in range(2)]
        total, lam = required_cutoff(bounds, 0, 0)
        G = expand(S, total, lam)
        assert recover_structure(G, S.manifold, S.w, bounds) == unflagged(S)


def test_recover_polynomial_terms():
    rng = random.Random(17)
    manifold = ManifoldData(Lattice.diagonal([1, -1]), b1=0, bplus=3)
    variables = series_variables(2)
    t1, t2, lam = (MultiPoly.variable(variables, n) for n in variables)
    one = MultiPoly.constant(variables, 1)
    for _ in range(3):
        terms = []
        for sector in (Sector.PLUS, Sector.MINUS):
            for _ in range(2):
                K = CohClass.of([rng.randint(-1, 1), rng.randint(-1, 1)])
                poly = one.scale(rng.randint(1, 3)) + t1.scale(rng.randint(-2, 2)) + (t2 * lam).scale(rng.randint(0, 2))
                terms.append((sector, K, poly))
        S = DonaldsonSeries.build(manifold, CohClass.of([0, 0]), terms)
        total, lam_cutoff = required_cutoff([1, 1], 1, 1)
        G = expand(S, total, lam_cutoff)
        recovered = recover_structure(G, manifold, S.w, 1, max_degree=1, max_lambda_degree=1)
        assert recovered == canonicalize(S)


def test_recover_rejects_fractional_frequency(two_class_manifold):
    variables = series_variables(2)
    t1, t2, lam = (MultiPoly.variable(variables, n) for n in variables)
    half_q = (t1 * t1 - t2 * t2).scale(gaussian(1) / 2)
    planted = half_q + lam.scale(2) + t1.scale(gaussian(3) / 2)
    G = exp_truncated(planted, Truncation.of(8, lambda_cutoff=1))
    with pytest.raises(FrequencyError):
        recover_structure(G, two_class_manifold, CohClass.of([1, 1]), 2)


def test_recover_validation(two_class):
    manifold, w = two_class.manifold, two_class.w
    with pytest.raises(InsufficientDepthError):
        recover_structure(expand(two_class, 2, 1), manifold, w, 1)
    with pytest.raises(DonaldsonValidationError):
        recover_structure(expand(two_class, 4, 1), manifold, w, [1])
    with pytest.raises(DonaldsonValidationError):
        recover_structure(TruncSeries.zero(series_variables(2), Truncation(6)), manifold, w, 1)
    with pytest.raises(VariableMismatchError):
        recover_structure(TruncSeries.zero(series_variables(3), Truncation.of(6, lambda_cutoff=1)), manifold, w, 1)


def test_recover_emits_events(two_class):
    dispatcher = EventDispatcher()
    recover_structure(expand(two_class, 4, 1), two_class.manifold, two_class.w, 1, dispatcher=dispatcher)
    types = [e.type for e in dispatcher.get_history()]
    assert types[0] == EventType.SECTORS_SEPARATED
    assert types[-1] == EventType.RESIDUAL_CHECKED
    assert EventType.DIRECTION_FITTED in types
    assert dispatcher.get_history(EventType.RESIDUAL_CHECKED)[0].payload == {"passed": True}


def test_recover_from_box_expansion(two_class):
    box = required_truncation([1, 1], 0, 0)
    G = expand_to(two_class, box)
    assert G.truncation.covers(box, series_variables(2))
    assert recover_structure(G, two_class.manifold, two_class.w, 1) == unflagged(two_class)


def test_recover_uses_detected_frequencies(two_class):
    dispatcher = EventDispatcher()
    G = expand(two_class, 12, 1)
    recovered = recover_structure(G, two_class.manifold, two_class.w, 3, dispatcher=dispatcher)
    assert recovered == unflagged(two_class)
    fitted = dispatcher.get_history(EventType.DIRECTION_FITTED)
    assert fitted and all(e.payload["detected"] for e in fitted)


def test_recover_falls_back_to_grid(two_class_manifold):
    # along t1 the mixed sequence 2 [t2^0] + 3 [t2^1] loses the e^(t1) part
    # of (3 - 5 t2) e^(t1 + t2), so only -1 is detected
    variables = series_variables(2)
    t2 = MultiPoly.variable(variables, "t2")
    terms = [
        (Sector.PLUS, CohClass.of([1, 1]), MultiPoly.constant(variables, 3) - t2.scale(5)),
        (Sector.PLUS, CohClass.of([-1, 1]), MultiPoly.constant(variables, 1)),
    ]
    S = DonaldsonSeries.build(two_class_manifold, CohClass.of([0, 0]), terms)
    dispatcher = EventDispatcher()
    G = expand_to(S, required_truncation([1, 1], 1, 0))
    recovered = recover_structure(G, two_class_manifold, S.w, 1, max_degree=1, dispatcher=dispatcher)
    assert recovered == canonicalize(S)
    along_t1 = [e for e in dispatcher.get_history(EventType.DIRECTION_FITTED) if e.payload["direction"] == "t1"]
    assert [e.payload["detected"] for e in along_t1] == [False]


# At most this many monomials in the fitting box of one fixture.
_BOX_LIMIT = 3000


def _box_size(bounds, max_degree, max_lambda_degree):
    size = 2 * (max_lambda_degree + 1)
    for b in bounds:
        size *= (2 * b + 1) * (max_degree + 1)
    return size


def _random_monomial(rng, rank, max_degree, max_lambda_degree):
    exponents = [0] * rank
    for _ in range(rng.randint(0, max_degree)):
        exponents[rng.randrange(rank)] += 1
    return tuple(exponents) + (rng.randint(0, max_lambda_degree),)


def random_fit_fixture(rng):
    """Two-sector series with up to four +-K pairs and polynomials of degree <= 2."""
    rank = rng.randint(2, 4)
    lattice = random_lattice(rng, rank)
    manifold = ManifoldData(lattice, b1=0, bplus=3)
    max_degree, max_lambda_degree = rng.randint(0, 2), rng.randint(0, 2)
    coordinate_bound = 3
    while True:
        classes = []
        for _ in range(rng.randint(1, 4)):
            K = random_characteristic(rng, lattice, coordinate_bound)
            if K not in classes and -K not in classes:
                classes += [K, -K]
        bounds = [max(abs(K[j]) for K in classes) for j in range(rank)]
        while _box_size(bounds, max_degree, max_lambda_degree) > _BOX_LIMIT and max_degree:
            max_degree -= 1
        while _box_size(bounds, max_degree, max_lambda_degree) > _BOX_LIMIT and max_lambda_degree:
            max_lambda_degree -= 1
        if _box_size(bounds, max_degree, max_lambda_degree) <= _BOX_LIMIT:
            break
        coordinate_bound = 1

    variables = series_variables(rank)
    terms = []
    for sector in (Sector.PLUS, Sector.MINUS):
        for K in classes:
            monomials = {_random_monomial(rng, rank, max_degree, max_lambda_degree): rng.choice([1, 2, 3, -1, -2])
                         for _ in range(rng.randint(1, 3))}
            terms.append((sector, K, MultiPoly.from_terms(variables, monomials)))
    S = DonaldsonSeries.build(manifold, CohClass.of([0] * rank), terms)
    return S, bounds, max_degree, max_lambda_degree


def test_recover_fifty_random_fixtures_in_time():
    rng = random.Random(4242)
    started = time.perf_counter()
    for _ in range(50):
        S, bounds, max_degree, max_lambda_degree = random_fit_fixture(rng)
        G = expand_to(S, required_truncation(bounds, max_degree, max_lambda_degree))
        recovered = recover_structure(
            G, S.manifold, S.w, bounds, max_degree=max_degree, max_lambda_degree=max_lambda_degree
        )
        assert recovered == canonicalize(S)
    assert time.perf_counter() - started < 300
