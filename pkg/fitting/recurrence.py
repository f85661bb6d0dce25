"""Minimal linear recurrences over the Gaussian rationals and exact root search."""
from typing import List, Sequence, Tuple

from sympy.polys.rings import PolyElement

from algebra.gaussian import ONE, ZERO, GaussianRational, gaussian
from algebra.poly import poly_ring

SHIFT_VAR = "x"


def berlekamp_massey(sequence: Sequence[GaussianRational]) -> List[GaussianRational]:
    """Connection polynomial of the shortest recurrence generating ``sequence``.

    Args:
        sequence: Terms s_0, s_1, ... over QQ_I

    Returns:
        [1, c_1, ..., c_L] with s_n + c_1 s_{n-1} + ... + c_L s_{n-L} = 0
    """
    C: List[GaussianRational] = [ONE]
    B: List[GaussianRational] = [ONE]
    L, m, b = 0, 1, ONE

    for n, s_n in enumerate(sequence):
        d = s_n
        for i in range(1, L + 1):
            if i < len(C):
                d = d + C[i] * sequence[n - i]
        if not d:
            m += 1
            continue

        factor = d / b
        T = list(C)
        needed = len(B) + m
        if len(C) < needed:
            C = C + [ZERO] * (needed - len(C))
        for i, coeff in enumerate(B):
            C[i + m] = C[i + m] - factor * coeff

        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1

    C = C + [ZERO] * max(0, L + 1 - len(C))
    return C[: L + 1]


def characteristic_polynomial(connection: Sequence[GaussianRational]) -> PolyElement:
    """x^L + c_1 x^(L-1) + ... + c_L for a connection polynomial [1, c_1, ..., c_L]."""
    R = poly_ring((SHIFT_VAR,))
    L = len(connection) - 1
    return R.from_dict({(L - i,): c for i, c in enumerate(connection)})


def gaussian_grid(bound: int, kind: str = "gaussian") -> List[GaussianRational]:
    """Candidate roots a + b i with |a|, |b| <= bound.

    Args:
        bound: Coordinate bound
        kind: "gaussian" (full grid), "real" (b = 0) or "imaginary" (a = 0)
    """
    values = range(-bound, bound + 1)
    if kind == "real":
        return [gaussian(a) for a in values]
    if kind == "imaginary":
        return [gaussian(0, b) for b in values]
    if kind == "gaussian":
        return [gaussian(a, b) for a in values for b in values]
    raise ValueError(f"unknown grid kind: {kind}")


def grid_roots(
    poly: PolyElement, candidates: Sequence[GaussianRational]
) -> Tuple[List[Tuple[GaussianRational, int]], PolyElement]:
    """Divide out every candidate root with its multiplicity.

    Returns:
        (roots with multiplicities in candidate order, the cofactor left over)
    """
    R = poly.ring
    x = R.gens[0]
    found: List[Tuple[GaussianRational, int]] = []
    rest = poly
    for z in candidates:
        linear = x - R.ground_new(z)
        mult = 0
        while rest.degree() > 0:
            quotient, remainder = divmod(rest, linear)
            if remainder:
                break
            rest, mult = quotient, mult + 1
        if mult:
            found.append((z, mult))
    return found, rest
