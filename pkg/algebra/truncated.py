"""Truncated power series in direction variables plus lambda.

A ``Truncation`` keeps every monomial whose total degree in the ordinary
variables is at most ``total`` and whose degree in each separately cut
variable (normally ``lam``) is at most its own limit. The set of kept
monomials is closed under division, so products and exponentials can be
pruned term by term without changing the surviving coefficients.
"""
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.monomials import monomial_mul
from sympy.polys.rings import PolyElement

from algebra.gaussian import ZERO, GaussianRational, Scalar, as_gaussian
from algebra.poly import LAMBDA, Monomial, MultiPoly, monomial_key, poly_ring
from core.errors import ConstantTermError, CutoffMismatchError, VariableMismatchError

_workers = 1

# Below this many term pairs a product is computed inline.
_PARALLEL_THRESHOLD = 20000


def configure_parallelism(threads: int) -> None:
    """Set the worker count used by truncated products (1 = sequential)."""
    global _workers
    _workers = max(1, int(threads))


def parallelism() -> int:
    return _workers


@dataclass(frozen=True)
class Truncation:
    """Total-degree cutoff plus optional per-variable cutoffs."""

    total: int
    separate: Tuple[Tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "separate", tuple(sorted(self.separate)))

    @classmethod
    def of(cls, total: int, lambda_cutoff: Optional[int] = None, **others: int) -> "Truncation":
        """Shorthand: ``Truncation.of(8, lambda_cutoff=2)``."""
        separate = dict(others)
        if lambda_cutoff is not None:
            separate[LAMBDA] = lambda_cutoff
        return cls(total, tuple(separate.items()))

    def cutoff_for(self, name: str) -> int:
        return dict(self.separate).get(name, self.total)

    def is_separate(self, name: str) -> bool:
        return name in dict(self.separate)

    def admitter(self, variables: Sequence[str]) -> Callable[[Monomial], bool]:
        """Return a predicate deciding which exponent vectors survive."""
        sep = dict(self.separate)
        missing = set(sep) - set(variables)
        if missing:
            raise VariableMismatchError(f"cutoff given for absent variables {sorted(missing)}")
        total_idx = [i for i, v in enumerate(variables) if v not in sep]
        sep_idx = [(i, sep[v]) for i, v in enumerate(variables) if v in sep]
        total = self.total

        def admits(monom: Monomial) -> bool:
            if sum(monom[i] for i in total_idx) > total:
                return False
            for i, limit in sep_idx:
                if monom[i] > limit:
                    return False
            return True

        return admits

    def meet(self, other: "Truncation") -> "Truncation":
        """The coarser of two truncations."""
        mine, theirs = dict(self.separate), dict(other.separate)
        if set(mine) != set(theirs):
            raise CutoffMismatchError("truncations cut different variables separately")
        return Truncation(
            min(self.total, other.total),
            tuple((k, min(mine[k], theirs[k])) for k in mine),
        )

    def covers(self, other: "Truncation", variables: Sequence[str]) -> bool:
        """True if every monomial kept by ``other`` is kept here too."""
        mine, theirs = dict(self.separate), dict(other.separate)

        def reach(names: Sequence[str]) -> int:
            # largest total degree over ``names`` that ``other`` admits
            top = sum(theirs[v] for v in names if v in theirs)
            if any(v not in theirs for v in names):
                top += other.total
            return top

        for v in variables:
            if v in mine and reach([v]) > mine[v]:
                return False
        group = [v for v in variables if v not in mine]
        return not group or reach(group) <= self.total

    def lowered(self, name: str, amount: int = 1) -> "Truncation":
        """Truncation left after differentiating ``amount`` times in ``name``."""
        sep = dict(self.separate)
        if name in sep:
            sep[name] -= amount
            return Truncation(self.total, tuple(sep.items()))
        return Truncation(self.total - amount, self.separate)

    def to_dict(self) -> Dict[str, int]:
        result = {"total": self.total}
        result.update(dict(self.separate))
        return result


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Immutable truncated series; the element only holds admitted monomials."""

    element: PolyElement
    truncation: Truncation

    @classmethod
    def from_poly(cls, poly: MultiPoly, truncation: Truncation) -> "TruncSeries":
        admits = truncation.admitter(poly.variables)
        kept = {m: c for m, c in poly.element.items() if admits(m)}
        return cls(poly.ring.from_dict(kept), truncation)

    @classmethod
    def zero(cls, variables: Sequence[str], truncation: Truncation) -> "TruncSeries":
        truncation.admitter(variables)
        return cls(poly_ring(tuple(variables)).zero, truncation)

    @classmethod
    def one(cls, variables: Sequence[str], truncation: Truncation) -> "TruncSeries":
        return cls.from_poly(MultiPoly.constant(variables, 1), truncation)

    @classmethod
    def from_terms(
        cls, variables: Sequence[str], terms: Mapping[Monomial, Scalar], truncation: Truncation
    ) -> "TruncSeries":
        return cls.from_poly(MultiPoly.from_terms(variables, terms), truncation)

    @property
    def ring(self):
        return self.element.ring

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(str(s) for s in self.element.ring.symbols)

    def index(self, name: str) -> int:
        return self.to_poly().index(name)

    def terms(self) -> List[Tuple[Monomial, GaussianRational]]:
        return sorted(self.element.items(), key=lambda item: monomial_key(item[0]))

    def coefficient(self, monom: Monomial) -> GaussianRational:
        return self.element.get(tuple(monom), ZERO)

    def is_zero(self) -> bool:
        return not self.element

    def to_poly(self) -> MultiPoly:
        return MultiPoly(self.element)

    def truncate(self, truncation: Truncation) -> "TruncSeries":
        """Restrict to a coarser truncation (the meet with the current one)."""
        target = self.truncation.meet(truncation)
        return TruncSeries.from_poly(self.to_poly(), target)

    def _check(self, other: "TruncSeries") -> None:
        if self.element.ring is not other.element.ring:
            raise VariableMismatchError(
                f"variable lists differ: {list(self.variables)} vs {list(other.variables)}"
            )
        if self.truncation != other.truncation:
            raise CutoffMismatchError(
                f"cutoffs differ: {self.truncation.to_dict()} vs {other.truncation.to_dict()}"
            )

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.element + other.element, self.truncation)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.element - other.element, self.truncation)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(-self.element, self.truncation)

    def scale(self, c: Scalar) -> "TruncSeries":
        return TruncSeries(self.to_poly().scale(c).element, self.truncation)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        if isinstance(other, MultiPoly):
            return self.mul_poly(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def mul_poly(self, poly: MultiPoly) -> "TruncSeries":
        """Multiply by a polynomial, keeping this series' truncation."""
        if poly.ring is not self.ring:
            raise VariableMismatchError("polynomial and series use different variables")
        admits = self.truncation.admitter(self.variables)
        product = _truncated_product(list(self.element.items()), list(poly.element.items()), admits)
        return TruncSeries(self.ring.from_dict(product), self.truncation)

    def diff(self, name: str) -> "TruncSeries":
        """Partial derivative; the cutoff in ``name`` drops by one."""
        return TruncSeries(self.to_poly().diff(name).element, self.truncation.lowered(name))

    def coefficient_of(self, name: str, power: int) -> "TruncSeries":
        """Coefficient series of ``name**power``, still in the same variables.

        The returned series has exponent 0 in ``name`` and a truncation lowered
        by ``power`` (only the remaining variables are known that deep).
        """
        i = self.to_poly().index(name)
        truncation = self.truncation.lowered(name, power)
        admits = truncation.admitter(self.variables)
        kept = {}
        for monom, coeff in self.element.items():
            if monom[i] == power:
                stripped = monom[:i] + (0,) + monom[i + 1:]
                if admits(stripped):
                    kept[stripped] = coeff
        return TruncSeries(self.ring.from_dict(kept), truncation)

    def substitute_scaled(self, factors: Mapping[str, Scalar]) -> "TruncSeries":
        """x -> c*x for the named variables; degrees are unchanged."""
        return TruncSeries(self.to_poly().substitute_scaled(factors).element, self.truncation)

    def first_difference(self, other: "TruncSeries") -> Optional[Monomial]:
        """Lowest monomial (graded-lex) where two compatible series differ."""
        self._check(other)
        diff = self.element - other.element
        if not diff:
            return None
        return min(diff.keys(), key=monomial_key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.truncation == other.truncation
            and dict(self.element) == dict(other.element)
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.truncation, frozenset(self.element.items())))

    def __str__(self) -> str:
        return f"{self.to_poly()} + O({self.truncation.to_dict()})"

    __repr__ = __str__


def _bucket_by_degree(items, admits_degree):
    buckets: Dict[int, list] = defaultdict(list)
    for monom, coeff in items:
        buckets[admits_degree(monom)].append((monom, coeff))
    return buckets


def _product_block(
    block: Sequence[Tuple[Monomial, GaussianRational]],
    buckets: Dict[int, list],
    degree: Callable[[Monomial], int],
    limit: int,
    admits: Callable[[Monomial], bool],
) -> Dict[Monomial, GaussianRational]:
    out: Dict[Monomial, GaussianRational] = {}
    for ma, ca in block:
        room = limit - degree(ma)
        for d, bucket in buckets.items():
            if d > room:
                continue
            for mb, cb in bucket:
                m = monomial_mul(ma, mb)
                if admits(m):
                    out[m] = out.get(m, ZERO) + ca * cb
    return out


def _truncated_product(
    a_items: List[Tuple[Monomial, GaussianRational]],
    b_items: List[Tuple[Monomial, GaussianRational]],
    admits: Callable[[Monomial], bool],
    truncation: Optional[Truncation] = None,
    variables: Optional[Sequence[str]] = None,
) -> Dict[Monomial, GaussianRational]:
    """Exact truncated product of two term lists, optionally threaded.

    Terms of ``b`` are bucketed by total degree so whole buckets that cannot
    fit are skipped; blocks of ``a`` are merged back in input order, which
    keeps the result independent of the worker count.
    """
    if not a_items or not b_items:
        return {}
    if truncation is not None and variables is not None:
        sep = dict(truncation.separate)
        idx = [i for i, v in enumerate(variables) if v not in sep]
        limit = truncation.total
    else:
        idx = list(range(len(a_items[0][0])))
        limit = max(sum(m) for m, _ in a_items) + max(sum(m) for m, _ in b_items)

    def degree(monom: Monomial) -> int:
        return sum(monom[i] for i in idx)

    buckets = _bucket_by_degree(b_items, degree)
    a_items = sorted(a_items, key=lambda item: monomial_key(item[0]))

    workers = _workers
    if workers <= 1 or len(a_items) * len(b_items) < _PARALLEL_THRESHOLD:
        return _product_block(a_items, buckets, degree, limit, admits)

    size = -(-len(a_items) // workers)
    blocks = [a_items[i:i + size] for i in range(0, len(a_items), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(lambda blk: _product_block(blk, buckets, degree, limit, admits), blocks))
    merged: Dict[Monomial, GaussianRational] = {}
    for partial in partials:
        for m, c in partial.items():
            merged[m] = merged.get(m, ZERO) + c
    return merged


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Truncated product of two series with identical variables and cutoffs.

    Raises:
        CutoffMismatchError: If the truncations differ
    """
    a._check(b)
    admits = a.truncation.admitter(a.variables)
    product = _truncated_product(
        list(a.element.items()), list(b.element.items()), admits, a.truncation, a.variables
    )
    return TruncSeries(a.ring.from_dict(product), a.truncation)


def truncate(series: TruncSeries, truncation: Union[int, Truncation]) -> TruncSeries:
    """Module-level alias of ``TruncSeries.truncate``; an int lowers only the total."""
    if isinstance(truncation, int):
        truncation = Truncation(truncation, series.truncation.separate)
    return series.truncate(truncation)


def exp_truncated(
    p: MultiPoly, truncation: Union[int, Truncation], lambda_cutoff: Optional[int] = None
) -> TruncSeries:
    """Truncated exponential of a polynomial without constant term.

    Uses the Euler-operator recurrence: writing g_k and f_d for the
    homogeneous parts of p and exp(p), d * f_d = sum_k k * g_k * f_{d-k}.
    Each coefficient is produced once, exactly.

    Args:
        p: Exponent polynomial
        truncation: Truncation, or a total-degree cutoff
        lambda_cutoff: Separate lambda cutoff when ``truncation`` is an int

    Returns:
        exp(p) truncated

    Raises:
        ConstantTermError: If p has a nonzero constant term
    """
    if isinstance(truncation, int):
        if lambda_cutoff is not None and LAMBDA in p.variables:
            truncation = Truncation.of(truncation, lambda_cutoff=lambda_cutoff)
        else:
            truncation = Truncation(truncation)
    if p.constant_term():
        raise ConstantTermError(f"exponent has constant term {p.constant_term()}")

    variables = p.variables
    admits = truncation.admitter(variables)
    zero = (0,) * len(variables)
    result = TruncSeries.one(variables, truncation)
    if truncation.total < 0 or p.is_zero():
        return result

    homogeneous: Dict[int, List[Tuple[Monomial, GaussianRational]]] = defaultdict(list)
    for monom, coeff in p.element.items():
        if admits(monom):
            homogeneous[sum(monom)].append((monom, coeff))
    if not homogeneous:
        return result

    top = truncation.total + sum(limit for _, limit in truncation.separate)
    width = max(homogeneous)
    parts: List[Dict[Monomial, GaussianRational]] = [{zero: as_gaussian(1)}]
    empty_run = 0
    for d in range(1, top + 1):
        current: Dict[Monomial, GaussianRational] = {}
        for k, g_terms in homogeneous.items():
            if k > d:
                continue
            for mg, cg in g_terms:
                weighted = cg * k
                for mf, cf in parts[d - k].items():
                    m = monomial_mul(mg, mf)
                    if admits(m):
                        current[m] = current.get(m, ZERO) + weighted * cf
        current = {m: c / d for m, c in current.items() if c}
        parts.append(current)
        empty_run = 0 if current else empty_run + 1
        if empty_run >= width:
            break

    merged: Dict[Monomial, GaussianRational] = {}
    for part in parts:
        merged.update(part)
    return TruncSeries(p.ring.from_dict(merged), truncation)


def mul_exp(series: TruncSeries, p: MultiPoly) -> TruncSeries:
    """series * exp(p), taking exp of one monomial of p at a time.

    Each factor exp(c m) has few terms, so no full expansion of exp(p) is
    ever multiplied in.

    Raises:
        VariableMismatchError: If p uses other variables
        ConstantTermError: If p has a nonzero constant term
    """
    if p.variables != series.variables:
        raise VariableMismatchError("exponent and series use different variables")
    result = series
    for monom, coeff in sorted(p.element.items(), key=lambda item: monomial_key(item[0])):
        factor = exp_truncated(MultiPoly.from_terms(series.variables, {monom: coeff}), series.truncation)
        result = series_mul(result, factor)
    return result
