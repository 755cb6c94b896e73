"""Exact Gaussian rationals, the scalar ring of every computation."""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from starmod.core.errors import ParseError

Number = Union[int, Fraction, "GaussianRational"]

_RATIONAL = r"\d+(?:/\d+)?"
_REAL_RE = re.compile(rf"^\s*([+-]?)\s*({_RATIONAL})\s*$")
_IMAG_RE = re.compile(rf"^\s*([+-]?)\s*({_RATIONAL})?\s*i\s*$")
_COMPLEX_RE = re.compile(
    rf"^\s*([+-]?)\s*({_RATIONAL})\s*([+-])\s*({_RATIONAL})?\s*i\s*$"
)


@dataclass(frozen=True)
class GaussianRational:
    """Value re + im·i with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Number) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        raise TypeError(f"Cannot use {type(value).__name__} as a Gaussian rational")

    # Arithmetic

    def __add__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Number) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Number) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __truediv__(self, other: Number) -> "GaussianRational":
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "GaussianRational":
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "GaussianRational":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        for _ in range(exponent):
            result = result * self
        return result

    def inverse(self) -> "GaussianRational":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"GaussianRational({format_scalar(self)!r})"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
HALF = GaussianRational(Fraction(1, 2))


def format_scalar(z: GaussianRational) -> str:
    """Render as "a/b+c/d i" with zero parts omitted ("3/2", "-1/4 i", "-i")."""
    if z.im == 0:
        return str(z.re)
    if z.im == 1:
        im_text = "i"
    elif z.im == -1:
        im_text = "-i"
    else:
        im_text = f"{z.im} i"
    if z.re == 0:
        return im_text
    sign = "" if im_text.startswith("-") else "+"
    return f"{z.re}{sign}{im_text}"


def parse_scalar(text: Union[str, int]) -> GaussianRational:
    """Inverse of format_scalar; also accepts bare integers and "1/1"."""
    if isinstance(text, bool):
        raise ParseError(f"Not a scalar: {text!r}")
    if isinstance(text, int):
        return GaussianRational(text)
    if not isinstance(text, str) or not text.strip():
        raise ParseError(f"Not a scalar: {text!r}")
    match = _REAL_RE.match(text)
    if match:
        return GaussianRational(_signed(match.group(1), match.group(2)))
    match = _IMAG_RE.match(text)
    if match:
        return GaussianRational(0, _signed(match.group(1), match.group(2) or "1"))
    match = _COMPLEX_RE.match(text)
    if match:
        return GaussianRational(
            _signed(match.group(1), match.group(2)),
            _signed(match.group(3), match.group(4) or "1"),
        )
    raise ParseError(f"Cannot parse Gaussian rational from {text!r}")


def _signed(sign: str, magnitude: str) -> Fraction:
    try:
        value = Fraction(magnitude)
    except ZeroDivisionError as e:
        raise ParseError(f"Zero denominator in {magnitude!r}") from e
    return -value if sign == "-" else value
