"""Exact recovery of structured series from truncated generating functions.

The generating function is split into its e^(2 lam) and e^(-2 lam) parts by
a confluent fit in lam, the Gaussian prefactor exp(+-Q/2) is divided out, and
what remains is fitted one direction at a time against the integer (Plus) or
imaginary-integer (Minus) frequency grid. Every step solves a confluent
Vandermonde system exactly and checks the rows it did not use.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import structlog

from algebra.gaussian import ONE, ZERO, GaussianRational, as_gaussian, gaussian, imag_part, real_part
from algebra.linalg import inverse
from algebra.poly import LAMBDA, MultiPoly
from algebra.truncated import Truncation, TruncSeries, mul_exp, parallelism
from core.errors import (
    DonaldsonValidationError,
    FitInconsistencyError,
    FrequencyError,
    InsufficientDepthError,
    ResidualError,
    VariableMismatchError,
)
from core.events import EventDispatcher, EventType
from fitting.recurrence import berlekamp_massey, characteristic_polynomial, gaussian_grid, grid_roots
from invariants.series import (
    DonaldsonSeries,
    OneCycleWord,
    Sector,
    SeriesFlags,
    expand_to,
    series_variables,
)
from lattice.forms import CohClass, ManifoldData

logger = structlog.get_logger(__name__)

Spectrum = Tuple[Tuple[GaussianRational, int], ...]


@dataclass(frozen=True)
class FitProblem:
    """Fit samples = sum_j P_j(variable) exp(mu_j variable), deg P_j < N_j."""

    samples: TruncSeries
    variable: str
    spectrum: Spectrum

    def __post_init__(self):
        spectrum = tuple((as_gaussian(mu), int(n)) for mu, n in self.spectrum)
        if not spectrum:
            raise DonaldsonValidationError("fit spectrum is empty")
        if any(n < 1 for _, n in spectrum):
            raise DonaldsonValidationError("multiplicities must be at least 1")
        if len({mu for mu, _ in spectrum}) != len(spectrum):
            raise DonaldsonValidationError("fit spectrum repeats an eigenvalue")
        if self.variable not in self.samples.variables:
            raise VariableMismatchError(f"samples have no variable {self.variable!r}")
        object.__setattr__(self, "spectrum", spectrum)

    @property
    def order(self) -> int:
        return sum(n for _, n in self.spectrum)

    @property
    def depth(self) -> int:
        """Number of sampled coefficients in the fit variable."""
        return self.samples.truncation.cutoff_for(self.variable) + 1


@dataclass(frozen=True, eq=False)
class ExponentialFit:
    """Coefficients c[j][k] of variable^k exp(mu_j variable)."""

    problem: FitProblem
    coefficients: Tuple[Tuple[TruncSeries, ...], ...]

    def polynomial(self, j: int) -> MultiPoly:
        """P_j as a polynomial (coefficients truncated to the fitted depth)."""
        variables = self.problem.samples.variables
        s = MultiPoly.variable(variables, self.problem.variable)
        result = MultiPoly.zero(variables)
        for k, c in enumerate(self.coefficients[j]):
            result = result + c.to_poly() * s ** k
        return result

    def polynomials(self) -> List[MultiPoly]:
        return [self.polynomial(j) for j in range(len(self.coefficients))]


def _columns(spectrum: Spectrum) -> List[Tuple[int, int]]:
    return [(j, k) for j, (_, n) in enumerate(spectrum) for k in range(n)]


def _vandermonde_entry(mu: GaussianRational, m: int, k: int) -> GaussianRational:
    """Coefficient of variable^m in variable^k exp(mu variable)."""
    if m < k:
        return ZERO
    return mu ** (m - k) / factorial(m - k) if m > k else ONE


def fit_exponential_sum(problem: FitProblem) -> ExponentialFit:
    """Solve the confluent Vandermonde system and check every extra row.

    Raises:
        InsufficientDepthError: If fewer coefficients than unknowns are sampled
        FitInconsistencyError: At the first sampled coefficient the fit misses
    """
    spectrum, var = problem.spectrum, problem.variable
    columns = _columns(spectrum)
    order = len(columns)
    depth = problem.depth
    if depth < order:
        raise InsufficientDepthError(
            f"{depth} coefficients sampled in {var}, {order} needed",
            {"variable": var, "depth": depth, "needed": order},
        )

    matrix = [[_vandermonde_entry(spectrum[j][0], m, k) for j, k in columns] for m in range(order)]
    inv = inverse(matrix)

    samples = problem.samples
    rows = [samples.coefficient_of(var, m) for m in range(depth)]
    base = rows[order - 1].truncation
    square = [row.truncate(base) for row in rows[:order]]

    solved: List[TruncSeries] = []
    for col in range(order):
        acc = TruncSeries.zero(samples.variables, base)
        for m in range(order):
            if inv[col][m]:
                acc = acc + square[m].scale(inv[col][m])
        solved.append(acc)

    for m in range(order, depth):
        target = rows[m]
        check = base.meet(target.truncation)
        predicted = TruncSeries.zero(samples.variables, check)
        for col, (j, k) in enumerate(columns):
            entry = _vandermonde_entry(spectrum[j][0], m, k)
            if entry:
                predicted = predicted + solved[col].truncate(check).scale(entry)
        if predicted != target.truncate(check):
            raise FitInconsistencyError(
                f"coefficient {var}^{m} is not reproduced by the fitted exponential sum",
                m,
                {"variable": var},
            )

    grouped: List[Tuple[TruncSeries, ...]] = []
    for j, (_, n) in enumerate(spectrum):
        grouped.append(tuple(solved[columns.index((j, k))] for k in range(n)))
    return ExponentialFit(problem, tuple(grouped))


def detect_frequencies(
    F: TruncSeries,
    bound: int,
    grid: str = "gaussian",
    variable: Optional[str] = None,
    strict: bool = True,
) -> List[Tuple[GaussianRational, int]]:
    """Frequencies and multiplicities of an exponential polynomial in one variable.

    Other variables, if any, are set to zero. The scaled coefficients
    m! [s^m] F satisfy a linear recurrence whose characteristic roots are
    the frequencies; they are looked up on the Gaussian-integer grid.
    With ``strict=False`` a recurrence longer than half the samples is
    still returned; callers must then confirm it by a fit.

    Raises:
        InsufficientDepthError: If the samples cannot pin the recurrence down
        FrequencyError: If a characteristic root is not on the grid
    """
    var = variable or F.variables[0]
    i = F.variables.index(var) if var in F.variables else None
    if i is None:
        raise VariableMismatchError(f"series has no variable {var!r}")
    depth = F.truncation.cutoff_for(var) + 1
    monom = [0] * len(F.variables)
    sequence = []
    for m in range(depth):
        monom[i] = m
        sequence.append(F.coefficient(tuple(monom)) * factorial(m))

    connection = berlekamp_massey(sequence)
    L = len(connection) - 1
    if strict and depth < 2 * L:
        raise InsufficientDepthError(
            f"{depth} samples cannot determine a recurrence of length {L}",
            {"depth": depth, "length": L},
        )
    if L == 0:
        return []
    roots, rest = grid_roots(characteristic_polynomial(connection), gaussian_grid(bound, grid))
    if rest.degree() > 0:
        raise FrequencyError(
            f"recurrence has roots outside the {grid} grid of bound {bound}",
            {"bound": bound, "grid": grid, "unmatched_degree": rest.degree()},
        )
    return roots


def required_cutoff(
    bounds: Sequence[int], max_degree: int, max_lambda_degree: int
) -> Tuple[int, int]:
    """(total cutoff, lam cutoff) that the direction-by-direction fit consumes."""
    total = sum((2 * b + 1) * (max_degree + 1) - 1 for b in bounds)
    return total, 2 * (max_lambda_degree + 1) - 1


def required_truncation(
    bounds: Sequence[int], max_degree: int, max_lambda_degree: int
) -> Truncation:
    """Per-direction box the fit consumes: t_j up to (2 B_j + 1)(d + 1) - 1.

    Every monomial of the box is needed, and nothing outside it is read.
    """
    cuts = [(2 * b + 1) * (max_degree + 1) - 1 for b in bounds]
    separate = tuple((f"t{j + 1}", cut) for j, cut in enumerate(cuts))
    return Truncation(sum(cuts), separate + ((LAMBDA, 2 * (max_lambda_degree + 1) - 1),))


def _with_limit(truncation: Truncation, name: str, limit: int) -> Truncation:
    separate = dict(truncation.separate)
    separate[name] = limit
    return Truncation(truncation.total, tuple(separate.items()))


def separate_sectors(G: TruncSeries, max_lambda_degree: int) -> Tuple[TruncSeries, TruncSeries]:
    """Split G = e^(2 lam) A + e^(-2 lam) B with A, B polynomial in lam.

    Returns:
        (A, B), each cut at lam-degree ``max_lambda_degree``
    """
    n = max_lambda_degree + 1
    fit = fit_exponential_sum(FitProblem(G, LAMBDA, ((gaussian(2), n), (gaussian(-2), n))))
    variables = G.variables
    lam = MultiPoly.variable(variables, LAMBDA)
    truncation = _with_limit(G.truncation, LAMBDA, max_lambda_degree)
    parts = []
    for coeffs in fit.coefficients:
        part = TruncSeries.zero(variables, truncation)
        for k, c in enumerate(coeffs):
            lifted = TruncSeries(c.element, _with_limit(c.truncation, LAMBDA, max_lambda_degree))
            part = part + lifted.mul_poly(lam ** k)
        parts.append(part)
    return parts[0], parts[1]


# Weights for folding the neighbouring coefficients into one sequence.
_PROJECTION_WEIGHTS = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def _project(node: TruncSeries, var: str) -> TruncSeries:
    """Univariate series in ``var`` mixing the coefficients of 1 and of each other variable.

    Every sampled coefficient is exact, so the result is an exponential
    polynomial in ``var`` whose frequencies are among those of ``node``.
    """
    variables = node.variables
    i = variables.index(var)
    zero = (0,) * len(variables)
    shifts = [zero]
    for j, name in enumerate(variables):
        if j != i and node.truncation.cutoff_for(name) >= 1:
            shifts.append(tuple(1 if k == j else 0 for k in range(len(variables))))
    weights = [gaussian(w) for w in _PROJECTION_WEIGHTS[: len(shifts)]]
    shifts = shifts[: len(weights)]

    admits = node.truncation.admitter(variables)
    terms = {}
    for m in range(node.truncation.cutoff_for(var) + 1):
        rows = [tuple(s + (m if k == i else 0) for k, s in enumerate(shift)) for shift in shifts]
        if not all(admits(row) for row in rows):
            break
        terms[(m,)] = sum((w * node.coefficient(row) for w, row in zip(weights, rows)), ZERO)
    depth = len(terms)
    return TruncSeries.from_terms((var,), terms, Truncation(depth - 1))


def _detected_spectrum(node: TruncSeries, var: str, bound: int, kind: str, budget: int) -> Optional[Spectrum]:
    try:
        found = detect_frequencies(_project(node, var), bound, kind, strict=False)
    except (InsufficientDepthError, FrequencyError):
        return None
    if not found or any(n > budget + 1 for _, n in found):
        return None
    return tuple(found)


def _fit_tensor(
    node: TruncSeries,
    level: int,
    budget: int,
    bounds: Sequence[int],
    kind: str,
    dispatcher: Optional[EventDispatcher],
) -> Dict[Tuple[GaussianRational, ...], MultiPoly]:
    """Peel off one direction at a time; keys are frequency tuples.

    The frequencies found by Berlekamp-Massey are tried first. If that fit
    misses a sampled coefficient the whole grid is fitted instead. A fit
    that reproduces every sampled row agrees with the grid fit, since its
    columns are grid columns and the grid system is uniquely solvable.
    """
    variables = node.variables
    rank = len(variables) - 1
    if node.is_zero():
        return {}
    if level == rank:
        return {(): node.to_poly()}

    var = variables[level]
    fit, used_detection = None, False
    detected = _detected_spectrum(node, var, bounds[level], kind, budget)
    if detected is not None:
        try:
            fit = fit_exponential_sum(FitProblem(node, var, detected))
            used_detection = True
        except (FitInconsistencyError, InsufficientDepthError):
            logger.debug("detected_spectrum_rejected", direction=var, frequencies=len(detected))
    if fit is None:
        spectrum = tuple((mu, budget + 1) for mu in gaussian_grid(bounds[level], kind))
        try:
            fit = fit_exponential_sum(FitProblem(node, var, spectrum))
        except FitInconsistencyError as e:
            raise FrequencyError(
                f"data along {var} is not an exponential polynomial with "
                f"{kind} integer frequencies up to {bounds[level]}",
                {"direction": var, "bound": bounds[level], "index": e.index},
            ) from e

    if dispatcher is not None:
        dispatcher.emit(
            EventType.DIRECTION_FITTED,
            source="structfit",
            direction=var,
            sector=kind,
            detected=used_detection,
        )

    t = MultiPoly.variable(variables, var)
    result: Dict[Tuple[GaussianRational, ...], MultiPoly] = {}
    for (mu, _), coeffs in zip(fit.problem.spectrum, fit.coefficients):
        for k, c in enumerate(coeffs):
            if c.is_zero():
                continue
            for key, poly in _fit_tensor(c, level + 1, budget - k, bounds, kind, dispatcher).items():
                full = (mu,) + key
                contribution = poly * t ** k
                result[full] = result[full] + contribution if full in result else contribution
    return {k: p for k, p in result.items() if not p.is_zero()}


def _prefactor(variables: Sequence[str], manifold: ManifoldData, sign: int) -> MultiPoly:
    """sign * Q(t)/2 as a polynomial."""
    gram = manifold.lattice.gram
    terms = {}
    for a in range(manifold.rank):
        for b in range(manifold.rank):
            if gram[a][b]:
                monom = [0] * len(variables)
                monom[a] += 1
                monom[b] += 1
                key = tuple(monom)
                terms[key] = terms.get(key, ZERO) + gaussian(sign * gram[a][b]) / 2
    return MultiPoly.from_terms(variables, terms)


def recover_structure(
    G: TruncSeries,
    manifold: ManifoldData,
    w: CohClass,
    bounds: Union[int, Sequence[int]],
    max_degree: int = 0,
    max_lambda_degree: int = 0,
    zword: Optional[OneCycleWord] = None,
    dispatcher: Optional[EventDispatcher] = None,
) -> DonaldsonSeries:
    """Recover the structured series whose expansion is G.

    Args:
        G: Truncated generating function in (t1, ..., tn, lam)
        manifold: Manifold data the series belongs to
        w: Its w class
        bounds: Per-direction bound on |K . e_j| (an int applies to all)
        max_degree: Bound on the t-degree of every polynomial
        max_lambda_degree: Bound on the lam-degree of every polynomial
        zword: 1-cycle bookkeeping for the result
        dispatcher: Optional event sink

    Returns:
        The canonical structured series (flags unset)

    Raises:
        InsufficientDepthError: If G does not reach ``required_truncation``
        FrequencyError: If a direction carries a frequency off the grid
        ResidualError: If the recovered series does not reproduce G
    """
    variables = series_variables(manifold.rank)
    if G.variables != variables:
        raise VariableMismatchError(f"expected variables {list(variables)}, got {list(G.variables)}")
    manifold.lattice.check(w, "w")
    if isinstance(bounds, int):
        bounds = [bounds] * manifold.rank
    bounds = list(bounds)
    if len(bounds) != manifold.rank or any(b < 0 for b in bounds):
        raise DonaldsonValidationError("need one non-negative bound per direction")
    if not G.truncation.is_separate(LAMBDA):
        raise DonaldsonValidationError("G must carry a separate lam cutoff")

    box = required_truncation(bounds, max_degree, max_lambda_degree)
    have = G.truncation
    if not have.covers(box, variables):
        raise InsufficientDepthError(
            f"cutoffs {have.to_dict()} do not reach {box.to_dict()}",
            {"required": box.to_dict(), "given": have.to_dict()},
        )
    log = logger.bind(manifold=manifold.name, rank=manifold.rank)

    work = TruncSeries.from_poly(G.to_poly(), box)
    A, B = separate_sectors(work, max_lambda_degree)
    if dispatcher is not None:
        dispatcher.emit(
            EventType.SECTORS_SEPARATED,
            source="structfit",
            plus_empty=A.is_zero(),
            minus_empty=B.is_zero(),
        )
    log.debug("sectors_separated", plus_terms=len(A.element), minus_terms=len(B.element))

    def sector_terms(part: TruncSeries, sector: Sector):
        if part.is_zero():
            return []
        sign = -1 if sector == Sector.PLUS else 1
        stripped = mul_exp(part, _prefactor(variables, manifold, sign))
        kind = "real" if sector == Sector.PLUS else "imaginary"
        fitted = _fit_tensor(stripped, 0, max_degree, bounds, kind, dispatcher)
        terms = []
        for freqs, poly in fitted.items():
            coords = [real_part(mu) if sector == Sector.PLUS else imag_part(mu) for mu in freqs]
            terms.append((sector, CohClass(tuple(int(c) for c in coords)), poly))
        return terms

    jobs = [(A, Sector.PLUS), (B, Sector.MINUS)]
    if parallelism() > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            results = list(pool.map(lambda job: sector_terms(*job), jobs))
    else:
        results = [sector_terms(*job) for job in jobs]

    recovered = DonaldsonSeries.build(manifold, w, results[0] + results[1], zword, SeriesFlags())
    check = expand_to(recovered, have)
    mismatch = check.first_difference(G)
    if dispatcher is not None:
        dispatcher.emit(EventType.RESIDUAL_CHECKED, source="structfit", passed=mismatch is None)
    if mismatch is not None:
        raise ResidualError(
            f"recovered series misses G at exponent {list(mismatch)}",
            {"exponent": list(mismatch)},
        )
    log.info("structure_recovered", terms=len(recovered.terms))
    return recovered
