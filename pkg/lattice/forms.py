"""Integer intersection lattices, classes in them, and the d0 bookkeeping.

Homology classes are coordinate vectors in the lattice basis and pair through
the Gram matrix. Cohomology classes are stored by their values on the basis
vectors, so evaluating one on a homology class is a plain dot product and the
product of two cohomology classes goes through the inverse Gram matrix.
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from algebra.linalg import SingularMatrixError, rational_inverse
from core.errors import LatticeError, ParityError


@dataclass(frozen=True)
class CohClass:
    """Integer coordinate vector; also used for homology classes."""

    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))

    @classmethod
    def of(cls, coords: Iterable[int]) -> "CohClass":
        return cls(tuple(coords))

    @classmethod
    def zero(cls, rank: int) -> "CohClass":
        return cls((0,) * rank)

    @classmethod
    def basis(cls, rank: int, index: int) -> "CohClass":
        return cls(tuple(1 if j == index else 0 for j in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check(self, other: "CohClass") -> None:
        if self.rank != other.rank:
            raise LatticeError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "CohClass") -> "CohClass":
        self._check(other)
        return CohClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "CohClass") -> "CohClass":
        self._check(other)
        return CohClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "CohClass":
        return CohClass(tuple(-a for a in self.coords))

    def __rmul__(self, k: int) -> "CohClass":
        return CohClass(tuple(k * a for a in self.coords))

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, j: int) -> int:
        return self.coords[j]

    def __lt__(self, other: "CohClass") -> bool:
        return self.coords < other.coords

    def extended(self, value: int = 0) -> "CohClass":
        return CohClass(self.coords + (value,))

    def dropped(self, index: int) -> "CohClass":
        return CohClass(self.coords[:index] + self.coords[index + 1:])

    def to_list(self) -> List[int]:
        return list(self.coords)

    def __str__(self) -> str:
        return str(self.coords)


@dataclass(frozen=True)
class Lattice:
    """Symmetric integer Gram matrix with named basis vectors."""

    gram: Tuple[Tuple[int, ...], ...]
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(gram)
        if n < 1:
            raise LatticeError("lattice rank must be at least 1")
        if any(len(row) != n for row in gram):
            raise LatticeError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
        labels = tuple(self.labels) or tuple(f"e{j + 1}" for j in range(n))
        if len(labels) != n:
            raise LatticeError(f"expected {n} labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise LatticeError(f"labels not distinct: {list(labels)}")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def diagonal(cls, entries: Sequence[int], labels: Sequence[str] = ()) -> "Lattice":
        n = len(entries)
        return cls(
            tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)),
            tuple(labels),
        )

    @property
    def rank(self) -> int:
        return len(self.gram)

    def check(self, c: CohClass, what: str = "class") -> CohClass:
        if c.rank != self.rank:
            raise LatticeError(f"{what} has rank {c.rank}, lattice has rank {self.rank}")
        return c

    def form(self, u: CohClass, v: CohClass) -> int:
        """Homology pairing u^T * gram * v."""
        self.check(u)
        self.check(v)
        return sum(
            u[i] * self.gram[i][j] * v[j]
            for i in range(self.rank)
            if u[i]
            for j in range(self.rank)
        )

    def square(self, x: CohClass) -> int:
        return self.form(x, x)

    def poincare_dual(self, x: CohClass) -> CohClass:
        """Cohomology class whose value on e_j is x . e_j."""
        self.check(x)
        return CohClass(tuple(sum(self.gram[j][k] * x[k] for k in range(self.rank)) for j in range(self.rank)))

    def evaluate(self, c: CohClass, x: CohClass) -> int:
        """Value of a cohomology class on a homology class."""
        self.check(c)
        self.check(x)
        return sum(a * b for a, b in zip(c, x))

    @cached_property
    def inverse_gram(self) -> List[List[Fraction]]:
        try:
            return rational_inverse(self.gram)
        except SingularMatrixError as e:
            raise LatticeError("cohomology products need a nondegenerate Gram matrix") from e

    def cohomology_pairing(self, c: CohClass, d: CohClass) -> Fraction:
        """Product of two cohomology classes (inverse Gram form)."""
        self.check(c)
        self.check(d)
        if c.is_zero() or d.is_zero():
            return Fraction(0)
        inv = self.inverse_gram
        return sum(
            (c[i] * inv[i][j] * d[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def cohomology_square(self, c: CohClass) -> Fraction:
        return self.cohomology_pairing(c, c)

    def fresh_label(self, prefix: str = "E") -> str:
        if prefix not in self.labels:
            return prefix
        k = 1
        while f"{prefix}{k}" in self.labels:
            k += 1
        return f"{prefix}{k}"

    def extend(self, label: Optional[str] = None, self_square: int = -1) -> "Lattice":
        """Orthogonal sum with a rank-one lattice <self_square>."""
        label = label or self.fresh_label()
        if label in self.labels:
            raise LatticeError(f"label {label!r} already used")
        rows = [row + (0,) for row in self.gram]
        rows.append((0,) * self.rank + (self_square,))
        return Lattice(tuple(rows), self.labels + (label,))

    def drop(self, index: int) -> "Lattice":
        """Remove an orthogonal basis vector."""
        if not 0 <= index < self.rank:
            raise LatticeError(f"index {index} outside rank {self.rank}")
        if self.rank == 1:
            raise LatticeError("cannot drop the only basis vector")
        for j in range(self.rank):
            if j != index and self.gram[index][j]:
                raise LatticeError(f"basis vector {index} is not orthogonal to the rest")
        rows = tuple(
            row[:index] + row[index + 1:] for i, row in enumerate(self.gram) if i != index
        )
        return Lattice(rows, self.labels[:index] + self.labels[index + 1:])

    def to_dict(self) -> dict:
        return {"rank": self.rank, "gram": [list(row) for row in self.gram], "labels": list(self.labels)}


@dataclass(frozen=True)
class ManifoldData:
    """What the series machinery needs to know about a 4-manifold."""

    lattice: Lattice
    b1: int
    bplus: int
    name: str = "X"
    strong_simple_type: Optional[bool] = None

    def __post_init__(self):
        if self.b1 < 0:
            raise LatticeError(f"b1 must be non-negative, got {self.b1}")
        if self.bplus < 2:
            raise LatticeError(f"b+ must be at least 2, got {self.bplus}")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def renamed(self, name: str) -> "ManifoldData":
        return replace(self, name=name)


@dataclass(frozen=True)
class D0Report:
    """d0 and its relation to the insertion degree d = deg2z / 2."""

    d0: Fraction
    deg2z: int
    d0_minus_d: int

    @property
    def residue(self) -> int:
        return self.d0_minus_d % 4

    def to_dict(self) -> dict:
        return {
            "d0": str(self.d0),
            "d": str(Fraction(self.deg2z, 2)),
            "d0_minus_d": self.d0_minus_d,
            "d0_minus_d_mod4": self.residue,
        }


def pairing(lattice: Lattice, u: CohClass, v: CohClass) -> int:
    return lattice.form(u, v)


def is_characteristic(lattice: Lattice, K: CohClass) -> bool:
    """K(x) = x.x (mod 2) on every basis vector."""
    lattice.check(K)
    return all((K[j] - lattice.gram[j][j]) % 2 == 0 for j in range(lattice.rank))


def d0(manifold: ManifoldData, w: CohClass) -> Fraction:
    """d0 = -w^2 - 3/2 (1 - b1 + b+)."""
    w2 = manifold.lattice.cohomology_square(w)
    return -w2 - Fraction(3, 2) * (1 - manifold.b1 + manifold.bplus)


def d0_mod4(manifold: ManifoldData, w: CohClass, deg2z: int) -> D0Report:
    """d0 and d0 - d reduced mod 4.

    Raises:
        ParityError: If d0 - d is not an integer
    """
    value = d0(manifold, w)
    diff = value - Fraction(deg2z, 2)
    if diff.denominator != 1:
        raise ParityError(
            f"d0 - d = {diff} is not an integer",
            {"d0": str(value), "deg2z": deg2z},
        )
    return D0Report(value, deg2z, int(diff))
