"""Exact dense linear algebra through sympy's DomainMatrix."""
from fractions import Fraction
from typing import List, Sequence

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from algebra.gaussian import GaussianRational, as_gaussian
from core.errors import DonaldsonValidationError


class SingularMatrixError(DonaldsonValidationError):
    """Matrix has no inverse over the field."""


def _square(rows: Sequence[Sequence]) -> int:
    n = len(rows)
    if n == 0 or any(len(row) != n for row in rows):
        raise DonaldsonValidationError("matrix must be square and non-empty")
    return n


def inverse(rows: Sequence[Sequence[GaussianRational]]) -> List[List[GaussianRational]]:
    """Exact inverse of a square matrix over the Gaussian rationals.

    Raises:
        SingularMatrixError: If the matrix is singular
    """
    n = _square(rows)
    matrix = DomainMatrix([[as_gaussian(x) for x in row] for row in rows], (n, n), QQ_I)
    try:
        inv = matrix.inv()
    except DMNonInvertibleMatrixError as e:
        raise SingularMatrixError("matrix is singular") from e
    return [list(row) for row in inv.to_ddm()]


def rational_inverse(rows: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """Exact inverse of an integer matrix, as Fractions.

    Raises:
        SingularMatrixError: If the matrix is singular
    """
    n = _square(rows)
    matrix = DomainMatrix([[QQ(int(x)) for x in row] for row in rows], (n, n), QQ)
    try:
        inv = matrix.inv()
    except DMNonInvertibleMatrixError as e:
        raise SingularMatrixError("matrix is singular") from e
    return [
        [Fraction(int(q.numerator), int(q.denominator)) for q in row]
        for row in inv.to_ddm()
    ]


def determinant(rows: Sequence[Sequence[int]]) -> int:
    n = _square(rows)
    matrix = DomainMatrix([[QQ(int(x)) for x in row] for row in rows], (n, n), QQ)
    det = matrix.det()
    return int(det.numerator) // int(det.denominator)
