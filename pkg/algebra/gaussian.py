"""Gaussian rationals a + b*i with exact rational parts.

Values are elements of sympy's ``QQ_I`` domain; this module only adds the
conversions and the text form used by the JSON documents ("a/b" or
"a/b+c/d*i", lowercase i, no spaces).
"""
import re
from fractions import Fraction
from typing import Union

from sympy.polys.domains import QQ, QQ_I

from core.errors import DocumentError

GaussianRational = QQ_I.dtype
Scalar = Union[int, Fraction, GaussianRational]

ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def _qq(value: Union[int, Fraction]):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ(int(value))


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def gaussian(re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0) -> GaussianRational:
    """Build re + im*i from integer or Fraction parts."""
    return QQ_I(_qq(re), _qq(im))


def as_gaussian(value: Union[Scalar, str]) -> GaussianRational:
    """Coerce an int, Fraction, string or Gaussian rational into ``QQ_I``."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, str):
        return parse_gaussian(value)
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Fraction)):
        return gaussian(value)
    raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")


def real_part(z: GaussianRational) -> Fraction:
    return _fraction(z.x)


def imag_part(z: GaussianRational) -> Fraction:
    return _fraction(z.y)


def is_zero(z: GaussianRational) -> bool:
    return not (z.x or z.y)


def is_real(z: GaussianRational) -> bool:
    return not z.y


def is_imaginary(z: GaussianRational) -> bool:
    return not z.x


def is_gaussian_integer(z: GaussianRational) -> bool:
    return real_part(z).denominator == 1 and imag_part(z).denominator == 1


def i_power(k: int) -> GaussianRational:
    """Return i**k for any integer k."""
    return (ONE, I, -ONE, -I)[k % 4]


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the document text form of a Gaussian rational.

    Args:
        text: "3", "-1/2", "1/2+3/4*i", "-5*i", ...

    Returns:
        The parsed value

    Raises:
        DocumentError: If the text does not follow the format
    """
    if not isinstance(text, str) or not text or " " in text:
        raise DocumentError(f"malformed Gaussian rational: {text!r}")

    if text.endswith("*i"):
        body = text[:-2]
        split = max(body.rfind("+"), body.rfind("-"))
        if split > 0:
            re_text, im_text = body[:split], body[split:]
        else:
            re_text, im_text = "0", body
    else:
        re_text, im_text = text, "0"

    for part in (re_text, im_text):
        if not _RATIONAL.match(part):
            raise DocumentError(f"malformed Gaussian rational: {text!r}")
    try:
        return gaussian(Fraction(re_text), Fraction(im_text))
    except ZeroDivisionError as e:
        raise DocumentError(f"zero denominator in {text!r}") from e


def format_gaussian(z: Scalar) -> str:
    """Render a value in the canonical document text form."""
    z = as_gaussian(z)
    re_part, im_part = real_part(z), imag_part(z)
    if im_part == 0:
        return str(re_part)
    if re_part == 0:
        return f"{im_part}*i"
    sign = "+" if im_part > 0 else ""
    return f"{re_part}{sign}{im_part}*i"
