"""Eigenvalue structure of the reduced Fukaya-Floer ring of a surface times S1.

The ring splits into 2g - 1 local pieces indexed by r in [-(g-1), g-1]. On
the r-th piece alpha, beta and gamma act with the eigenvalues tabulated by
``spectrum``; writing alpha = 2 d/ds and beta = -4 d/dlam turns the
nilpotency relations into differential operators that annihilate the
generating function restricted to tD + s*Sigma.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Tuple

from algebra.gaussian import ONE, ZERO, I, GaussianRational, Scalar, as_gaussian, format_gaussian
from algebra.poly import LAMBDA, MultiPoly
from algebra.truncated import Truncation, TruncSeries, series_mul
from core.errors import DonaldsonValidationError, InsufficientDepthError, VariableMismatchError

T_VAR = "t"
S_VAR = "s"


@dataclass(frozen=True)
class Eigenvalue:
    """constant + slope * t, with Gaussian-rational coefficients."""

    constant: GaussianRational = ZERO
    slope: GaussianRational = ZERO

    def __post_init__(self):
        object.__setattr__(self, "constant", as_gaussian(self.constant))
        object.__setattr__(self, "slope", as_gaussian(self.slope))

    def scaled(self, c: Scalar, slope_factor: Scalar = 1) -> "Eigenvalue":
        c = as_gaussian(c)
        return Eigenvalue(self.constant * c, self.slope * c * as_gaussian(slope_factor))

    def __str__(self) -> str:
        if not self.slope:
            return format_gaussian(self.constant)
        slope = format_gaussian(self.slope)
        linear = "t" if slope == "1" else "-t" if slope == "-1" else f"({slope})*t"
        if not self.constant:
            return linear
        return f"{format_gaussian(self.constant)}+{linear}".replace("+-", "-")

    def to_dict(self) -> Dict[str, str]:
        return {"constant": format_gaussian(self.constant), "slope": format_gaussian(self.slope)}


@dataclass(frozen=True)
class SpectrumEntry:
    r: int
    alpha: Eigenvalue
    beta: int
    gamma_nilpotent: bool = True

    @property
    def parity(self) -> str:
        return "odd" if self.r % 2 else "even"

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "parity": self.parity,
            "alpha": self.alpha.to_dict(),
            "beta": self.beta,
            "gamma_nilpotent": self.gamma_nilpotent,
        }


@dataclass(frozen=True)
class HFFSpectrum:
    genus: int
    order: int
    entries: Tuple[SpectrumEntry, ...]

    def entry(self, r: int) -> SpectrumEntry:
        for e in self.entries:
            if e.r == r:
                return e
        raise DonaldsonValidationError(f"r={r} outside [-{self.genus - 1}, {self.genus - 1}]")

    def to_dict(self) -> dict:
        return {"genus": self.genus, "order": self.order, "entries": [e.to_dict() for e in self.entries]}


def spectrum(g: int, N: int = 1) -> HFFSpectrum:
    """Eigenvalue table for genus g and nilpotency order N.

    Even r: alpha = 4ri - 2t, beta = 8. Odd r: alpha = 4r + 2t, beta = -8.
    """
    if g < 1:
        raise DonaldsonValidationError(f"genus must be at least 1, got {g}")
    if N < 1:
        raise DonaldsonValidationError(f"nilpotency order must be at least 1, got {N}")
    entries = []
    for r in range(-(g - 1), g):
        if r % 2:
            entries.append(SpectrumEntry(r, Eigenvalue(4 * r, 2), -8))
        else:
            entries.append(SpectrumEntry(r, Eigenvalue(I * (4 * r), -2), 8))
    return HFFSpectrum(g, N, tuple(entries))


# differential operators

@dataclass(frozen=True)
class AnnihilatorFactor:
    """(d/d variable - eigenvalue)^multiplicity."""

    variable: str
    eigenvalue: Eigenvalue
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise DonaldsonValidationError("factor multiplicity must be at least 1")

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "eigenvalue": self.eigenvalue.to_dict(),
            "display": str(self.eigenvalue),
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class AnnihilatorOp:
    """A product of commuting first-order factors, merged per eigenvalue."""

    factors: Tuple[AnnihilatorFactor, ...] = ()

    def __post_init__(self):
        merged: Dict[Tuple[str, Eigenvalue], int] = {}
        for f in self.factors:
            key = (f.variable, f.eigenvalue)
            merged[key] = merged.get(key, 0) + f.multiplicity
        ordered = sorted(merged.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))
        object.__setattr__(
            self, "factors", tuple(AnnihilatorFactor(v, e, m) for (v, e), m in ordered)
        )

    def __mul__(self, other: "AnnihilatorOp") -> "AnnihilatorOp":
        return AnnihilatorOp(self.factors + other.factors)

    def eigenvalues(self, variable: str) -> List[Eigenvalue]:
        return [f.eigenvalue for f in self.factors if f.variable == variable]

    def total_multiplicity(self, variable: str) -> int:
        return sum(f.multiplicity for f in self.factors if f.variable == variable)

    def to_dict(self) -> dict:
        return {"factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True)
class Annihilators:
    plus: AnnihilatorOp
    minus: AnnihilatorOp
    combined: AnnihilatorOp

    def to_dict(self) -> dict:
        return {
            "plus": self.plus.to_dict(),
            "minus": self.minus.to_dict(),
            "combined": self.combined.to_dict(),
        }


def _s_eigenvalue(entry: SpectrumEntry, dsigma: int) -> Eigenvalue:
    # alpha = 2 d/ds, with t measured along D so t picks up D.Sigma
    return entry.alpha.scaled(ONE / 2, dsigma)


def _lambda_eigenvalue(beta: int) -> Eigenvalue:
    # beta = -4 d/dlam
    return Eigenvalue(as_gaussian(beta) / -4)


def annihilators(g: int, N: int, dsigma: int) -> Annihilators:
    """Operators attached to the odd-r (plus) and even-r (minus) pieces.

    Plus: (d/ds - (2r + t dSigma))^N for odd r and (d/dlam - 2)^N.
    Minus: (d/ds - (2ri - t dSigma))^N for even r and (d/dlam + 2)^N.
    """
    table = spectrum(g, N)
    plus: List[AnnihilatorFactor] = [AnnihilatorFactor(LAMBDA, _lambda_eigenvalue(-8), N)]
    minus: List[AnnihilatorFactor] = [AnnihilatorFactor(LAMBDA, _lambda_eigenvalue(8), N)]
    for entry in table.entries:
        factor = AnnihilatorFactor(S_VAR, _s_eigenvalue(entry, dsigma), N)
        (plus if entry.r % 2 else minus).append(factor)
    plus_op, minus_op = AnnihilatorOp(tuple(plus)), AnnihilatorOp(tuple(minus))
    return Annihilators(plus_op, minus_op, plus_op * minus_op)


def relation_annihilator(g: int, N: int, dsigma: int, sector: str = "plus") -> AnnihilatorOp:
    """Image of ``plus_relation`` (or ``minus_relation``) under alpha = 2 d/ds, beta = -4 d/dlam.

    The plus relation (beta - 8)^N prod_{r odd} (alpha - (4r + 2t))^N becomes
    (d/dlam + 2)^N prod_{r odd} (d/ds - (2r + t dSigma))^N.
    """
    if sector not in ("plus", "minus"):
        raise DonaldsonValidationError(f"unknown sector {sector!r}")
    table = spectrum(g, N)
    want_odd = sector == "plus"
    # the relation carries (beta - 8) for the odd pieces and (beta + 8) for the even ones
    lam = _lambda_eigenvalue(8) if want_odd else _lambda_eigenvalue(-8)
    factors = [AnnihilatorFactor(LAMBDA, lam, N)]
    for entry in table.entries:
        if bool(entry.r % 2) == want_odd:
            factors.append(AnnihilatorFactor(S_VAR, _s_eigenvalue(entry, dsigma), N))
    return AnnihilatorOp(tuple(factors))


def sst_annihilator(g: int, dsigma: int) -> AnnihilatorOp:
    """prod_{r=-(g-1)}^{g-1} (d/ds - (2r + t dSigma)) for simple-type series."""
    if g < 1:
        raise DonaldsonValidationError(f"genus must be at least 1, got {g}")
    return AnnihilatorOp(
        tuple(
            AnnihilatorFactor(S_VAR, Eigenvalue(2 * r, dsigma))
            for r in range(-(g - 1), g)
        )
    )


def apply_annihilator(F: TruncSeries, op: AnnihilatorOp) -> TruncSeries:
    """Apply every factor; the truncation shrinks with each derivative.

    Raises:
        VariableMismatchError: If F lacks a variable the operator needs
    """
    variables = F.variables
    for factor in op.factors:
        if factor.variable not in variables:
            raise VariableMismatchError(f"series has no variable {factor.variable!r}")
        if factor.eigenvalue.slope and T_VAR not in variables:
            raise VariableMismatchError(f"eigenvalue {factor.eigenvalue} needs variable {T_VAR!r}")
    t_poly = MultiPoly.variable(variables, T_VAR) if T_VAR in variables else None

    for factor in op.factors:
        mu = factor.eigenvalue
        for _ in range(factor.multiplicity):
            derived = F.diff(factor.variable)
            base = F.truncate(derived.truncation)
            shifted = base.scale(mu.constant)
            if mu.slope:
                shifted = shifted + base.mul_poly(t_poly.scale(mu.slope))
            F = derived - shifted
    return F


def check_annihilated(F: TruncSeries, op: AnnihilatorOp) -> bool:
    """True iff ``op`` sends F to zero up to the cutoff that stays valid.

    Raises:
        InsufficientDepthError: If a cutoff is below the operator's total
            multiplicity in that variable
    """
    truncation = F.truncation
    total_vars = [v for v in F.variables if not truncation.is_separate(v)]
    needed_total = sum(op.total_multiplicity(v) for v in total_vars)
    if needed_total and truncation.total < needed_total:
        raise InsufficientDepthError(
            f"total cutoff {truncation.total} is below multiplicity {needed_total}",
            {"cutoff": truncation.total, "multiplicity": needed_total},
        )
    for name, limit in truncation.separate:
        needed = op.total_multiplicity(name)
        if needed and limit < needed:
            raise InsufficientDepthError(
                f"cutoff {limit} in {name} is below multiplicity {needed}",
                {"variable": name, "cutoff": limit, "multiplicity": needed},
            )
    return apply_annihilator(F, op).is_zero()


# effective ring

Exponent3 = Tuple[int, int, int]


@dataclass(frozen=True)
class EffectiveRing:
    """Direct sum over r of C[[t]][a, b, c] / ((a - mu_alpha)^N, (b - mu_beta)^N, c^N).

    Elements are stored in shifted coordinates A = a - mu_alpha,
    B = b - mu_beta and C = c, so reduction drops every exponent >= N.
    """

    genus: int
    order: int
    t_cutoff: int

    def __post_init__(self):
        spectrum(self.genus, self.order)
        if self.t_cutoff < 0:
            raise DonaldsonValidationError("t cutoff must be non-negative")

    @cached_property
    def table(self) -> HFFSpectrum:
        return spectrum(self.genus, self.order)

    @property
    def truncation(self) -> Truncation:
        return Truncation(self.t_cutoff)

    def _series(self, eigen: Eigenvalue) -> TruncSeries:
        return TruncSeries.from_terms(
            (T_VAR,), {(0,): eigen.constant, (1,): eigen.slope}, self.truncation
        )

    def _uniform(self, exponent: Exponent3, value: TruncSeries) -> "HFFElement":
        return HFFElement(self, tuple({exponent: value} for _ in self.table.entries))

    def zero(self) -> "HFFElement":
        return HFFElement(self, tuple({} for _ in self.table.entries))

    def scalar(self, value) -> "HFFElement":
        """A constant or an Eigenvalue (constant + slope t) in every component."""
        eigen = value if isinstance(value, Eigenvalue) else Eigenvalue(as_gaussian(value))
        return self._uniform((0, 0, 0), self._series(eigen))

    def alpha(self) -> "HFFElement":
        one = self._series(Eigenvalue(ONE))
        return HFFElement(
            self,
            tuple(
                _clean({(0, 0, 0): self._series(e.alpha), (1, 0, 0): one}, self.order)
                for e in self.table.entries
            ),
        )

    def beta(self) -> "HFFElement":
        one = self._series(Eigenvalue(ONE))
        return HFFElement(
            self,
            tuple(
                _clean({(0, 0, 0): self._series(Eigenvalue(e.beta)), (0, 1, 0): one}, self.order)
                for e in self.table.entries
            ),
        )

    def gamma(self) -> "HFFElement":
        one = self._series(Eigenvalue(ONE))
        return HFFElement(
            self, tuple(_clean({(0, 0, 1): one}, self.order) for _ in self.table.entries)
        )


def _clean(component: Mapping[Exponent3, TruncSeries], order: int) -> Dict[Exponent3, TruncSeries]:
    return {e: c for e, c in component.items() if max(e) < order and not c.is_zero()}


@dataclass(frozen=True, eq=False)
class HFFElement:
    ring: EffectiveRing
    components: Tuple[Dict[Exponent3, TruncSeries], ...] = field(default=())

    def _check(self, other: "HFFElement") -> None:
        if self.ring != other.ring:
            raise DonaldsonValidationError(
                "effective ring elements with different genus, order or t cutoff"
            )

    def _lift(self, other) -> "HFFElement":
        if isinstance(other, HFFElement):
            self._check(other)
            return other
        return self.ring.scalar(other)

    def __add__(self, other) -> "HFFElement":
        other = self._lift(other)
        out = []
        for mine, theirs in zip(self.components, other.components):
            merged = dict(mine)
            for e, c in theirs.items():
                merged[e] = merged[e] + c if e in merged else c
            out.append(_clean(merged, self.ring.order))
        return HFFElement(self.ring, tuple(out))

    __radd__ = __add__

    def __neg__(self) -> "HFFElement":
        return HFFElement(self.ring, tuple({e: -c for e, c in comp.items()} for comp in self.components))

    def __sub__(self, other) -> "HFFElement":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "HFFElement":
        return self._lift(other) - self

    def __mul__(self, other) -> "HFFElement":
        other = self._lift(other)
        order = self.ring.order
        out = []
        for mine, theirs in zip(self.components, other.components):
            product: Dict[Exponent3, TruncSeries] = {}
            for e1, c1 in mine.items():
                for e2, c2 in theirs.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    if max(e) >= order:
                        continue
                    term = series_mul(c1, c2)
                    product[e] = product[e] + term if e in product else term
            out.append(_clean(product, order))
        return HFFElement(self.ring, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HFFElement":
        if n < 0:
            raise DonaldsonValidationError("negative powers are not defined")
        result = self.ring.scalar(1)
        for _ in range(n):
            result = result * self
        return result

    def component(self, r: int) -> Dict[Exponent3, TruncSeries]:
        entries = self.ring.table.entries
        for entry, comp in zip(entries, self.components):
            if entry.r == r:
                return dict(comp)
        raise DonaldsonValidationError(f"no component r={r}")

    def is_zero(self) -> bool:
        return all(not comp for comp in self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HFFElement):
            return NotImplemented
        return self.ring == other.ring and self.components == other.components


def plus_relation(ring: EffectiveRing) -> HFFElement:
    """(beta - 8)^N prod_{r odd} (alpha - (4r + 2t))^N."""
    N = ring.order
    result = (ring.beta() - 8) ** N
    for entry in ring.table.entries:
        if entry.r % 2:
            result = result * (ring.alpha() - ring.scalar(entry.alpha)) ** N
    return result


def minus_relation(ring: EffectiveRing) -> HFFElement:
    """(beta + 8)^N prod_{r even} (alpha - (4ri - 2t))^N."""
    N = ring.order
    result = (ring.beta() + 8) ** N
    for entry in ring.table.entries:
        if not entry.r % 2:
            result = result * (ring.alpha() - ring.scalar(entry.alpha)) ** N
    return result
