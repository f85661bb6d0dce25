"""Sparse multivariate polynomials over the Gaussian rationals.

A ``MultiPoly`` wraps a sympy ``PolyElement`` living in a cached ring over
``QQ_I`` with graded-lex ordering. The ring's generator names are the
polynomial's variable list; two polynomials combine only when the lists
are identical.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from algebra.gaussian import ZERO, GaussianRational, Scalar, as_gaussian, format_gaussian
from core.errors import DonaldsonValidationError, VariableMismatchError

Monomial = Tuple[int, ...]

LAMBDA = "lam"


@lru_cache(maxsize=None)
def poly_ring(variables: Tuple[str, ...]) -> PolyRing:
    """Return the shared sympy ring for a variable list.

    Args:
        variables: Ordered, distinct variable names

    Returns:
        Polynomial ring over QQ_I in those variables
    """
    if not variables:
        raise VariableMismatchError("a polynomial needs at least one variable")
    if len(set(variables)) != len(variables):
        raise VariableMismatchError(f"duplicate variable names: {list(variables)}")
    return ring(list(variables), QQ_I, grlex)[0]


def monomial_key(monom: Monomial) -> Tuple[int, Tuple[int, ...]]:
    """Sort key for ascending graded-lex output (lower degree first)."""
    return (sum(monom), tuple(-e for e in monom))


@dataclass(frozen=True, eq=False)
class MultiPoly:
    """Immutable polynomial; never mutate ``element`` after construction."""

    element: PolyElement

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(poly_ring(tuple(variables)).zero)

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar) -> "MultiPoly":
        return cls(poly_ring(tuple(variables)).ground_new(as_gaussian(value)))

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        R = poly_ring(tuple(variables))
        return cls(R.gens[_index(tuple(variables), name)])

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Mapping[Monomial, Scalar]) -> "MultiPoly":
        """Build from a monomial -> coefficient map; zero coefficients are dropped."""
        variables = tuple(variables)
        R = poly_ring(variables)
        converted: Dict[Monomial, GaussianRational] = {}
        for monom, coeff in terms.items():
            monom = tuple(int(e) for e in monom)
            if len(monom) != len(variables) or any(e < 0 for e in monom):
                raise VariableMismatchError(
                    f"exponent vector {monom} does not fit variables {list(variables)}"
                )
            converted[monom] = converted.get(monom, ZERO) + as_gaussian(coeff)
        return cls(R.from_dict(converted))

    @property
    def ring(self) -> PolyRing:
        return self.element.ring

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(str(s) for s in self.element.ring.symbols)

    def index(self, name: str) -> int:
        return _index(self.variables, name)

    def terms(self) -> List[Tuple[Monomial, GaussianRational]]:
        """Terms in canonical graded-lex order."""
        return sorted(self.element.items(), key=lambda item: monomial_key(item[0]))

    def coefficient(self, monom: Monomial) -> GaussianRational:
        return self.element.get(tuple(monom), ZERO)

    def is_zero(self) -> bool:
        return not self.element

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.element.keys())

    def constant_term(self) -> GaussianRational:
        return self.coefficient((0,) * len(self.variables))

    def degree(self, name: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = self.index(name)
        return max((m[i] for m in self.element.keys()), default=-1)

    def total_degree(self, names: Optional[Iterable[str]] = None) -> int:
        """Total degree over ``names`` (all variables by default); -1 for zero."""
        idx = range(len(self.variables)) if names is None else [self.index(n) for n in names]
        return max((sum(m[i] for i in idx) for m in self.element.keys()), default=-1)

    def _check(self, other: "MultiPoly") -> None:
        if self.element.ring is not other.element.ring:
            raise VariableMismatchError(
                f"variable lists differ: {list(self.variables)} vs {list(other.variables)}"
            )

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return MultiPoly(self.element + other.element)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return MultiPoly(self.element - other.element)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(-self.element)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return MultiPoly(self.element * other.element)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c: Scalar) -> "MultiPoly":
        c = as_gaussian(c)
        if not c:
            return MultiPoly(self.ring.zero)
        return MultiPoly(self.element * c)

    def __pow__(self, n: int) -> "MultiPoly":
        return MultiPoly(self.element ** n)

    def diff(self, name: str) -> "MultiPoly":
        return MultiPoly(self.element.diff(self.ring.gens[self.index(name)]))

    def directional(self, direction: Mapping[str, Scalar]) -> "MultiPoly":
        """Sum of c * d/d(name) over the direction's entries."""
        result = self.ring.zero
        for name, c in direction.items():
            c = as_gaussian(c)
            if c:
                result += self.element.diff(self.ring.gens[self.index(name)]) * c
        return MultiPoly(result)

    def substitute_scaled(self, factors: Mapping[str, Scalar]) -> "MultiPoly":
        """Replace each named variable x by c*x."""
        scale = [as_gaussian(1)] * len(self.variables)
        for name, c in factors.items():
            scale[self.index(name)] = as_gaussian(c)
        terms = {}
        for monom, coeff in self.element.items():
            factor = coeff
            for c, e in zip(scale, monom):
                if e:
                    factor = factor * c ** e
            terms[monom] = factor
        return MultiPoly(self.ring.from_dict(terms))

    def at_zero(self, name: str) -> "MultiPoly":
        """Set one variable to zero, keeping the variable list."""
        i = self.index(name)
        return MultiPoly(self.ring.from_dict({m: c for m, c in self.element.items() if not m[i]}))

    def remap(self, variables: Sequence[str], positions: Sequence[Optional[int]]) -> "MultiPoly":
        """Move into another ring.

        Args:
            variables: Target variable list
            positions: For each current variable, its index in the target, or
                None when the variable is dropped (its exponent must be zero)

        Returns:
            The same polynomial written in the target variables
        """
        variables = tuple(variables)
        if len(positions) != len(self.variables):
            raise VariableMismatchError("remap needs one position per variable")
        R = poly_ring(variables)
        terms = {}
        for monom, coeff in self.element.items():
            target = [0] * len(variables)
            for e, pos in zip(monom, positions):
                if pos is None:
                    if e:
                        raise VariableMismatchError("cannot drop a variable that occurs")
                    continue
                target[pos] += e
            terms[tuple(target)] = coeff
        return MultiPoly(R.from_dict(terms))

    def compose_linear(
        self, variables: Sequence[str], substitution: Mapping[str, Mapping[str, Scalar]]
    ) -> "MultiPoly":
        """Substitute a linear form in new variables for every current variable.

        Args:
            variables: Target variable list
            substitution: current name -> {target name: coefficient}; current
                variables missing here are mapped to the target variable of the
                same name

        Returns:
            Polynomial in the target ring
        """
        variables = tuple(variables)
        R = poly_ring(variables)
        forms = []
        for name in self.variables:
            if name in substitution:
                form = R.zero
                for target, c in substitution[name].items():
                    form += R.gens[_index(variables, target)] * as_gaussian(c)
            else:
                form = R.gens[_index(variables, name)]
            forms.append(form)

        powers: Dict[Tuple[int, int], PolyElement] = {}

        def power(i: int, e: int) -> PolyElement:
            if (i, e) not in powers:
                powers[(i, e)] = forms[i] ** e
            return powers[(i, e)]

        result = R.zero
        for monom, coeff in self.element.items():
            term = R.ground_new(coeff)
            for i, e in enumerate(monom):
                if e:
                    term = term * power(i, e)
            result += term
        return MultiPoly(result)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and dict(self.element) == dict(other.element)

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.element.items())))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for monom, coeff in self.terms():
            factors = [format_gaussian(coeff)]
            for name, e in zip(self.variables, monom):
                if e:
                    factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    __repr__ = __str__


def _index(variables: Tuple[str, ...], name: str) -> int:
    try:
        return variables.index(name)
    except ValueError as e:
        raise VariableMismatchError(f"unknown variable {name!r} in {list(variables)}") from e


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Add or multiply two polynomials over the same variable list.

    Args:
        a: Left operand
        b: Right operand
        op: "add" or "mul"

    Returns:
        Exact, zero-pruned result

    Raises:
        DonaldsonValidationError: If op is neither
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise DonaldsonValidationError(f"unknown polynomial operation: {op}", {"operation": op})
