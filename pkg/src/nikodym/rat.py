"""Canonical rational strings and a lazy power-of-two magnitude.

Rationals travel as "p/q" with q > 0 and gcd(p, q) = 1; the denominator is
always written, so 2 serializes as "2/1".  BigMag compares m * 2**e values
whose plain-integer form would be astronomically large (e is itself a bigint).
"""

import math
import re
import sys
from fractions import Fraction

from .errors import MagnitudeOverflow, ParseError

_RAT_RE = re.compile(r"^(-?\d+)/(\d+)$")

# materialization guard: ints above this many bits stay lazy
INT_BIT_LIMIT = 1 << 22

# any int below the bit limit (about 1.27M digits) must also format;
# the interpreter's default str() guard is far lower, so lift it once here
_NEEDED_DIGITS = INT_BIT_LIMIT // 3
if hasattr(sys, "get_int_max_str_digits"):
    if sys.get_int_max_str_digits() < _NEEDED_DIGITS:
        sys.set_int_max_str_digits(_NEEDED_DIGITS)


def parse_rational(s: str) -> Fraction:
    m = _RAT_RE.match(s.strip())
    if not m:
        raise ParseError(f"rational must look like p/q, got {s!r}")
    p, q = int(m.group(1)), int(m.group(2))
    if q <= 0:
        raise ParseError(f"denominator must be positive in {s!r}")
    if math.gcd(abs(p), q) != 1 and not (p == 0 and q == 1):
        raise ParseError(f"rational {s!r} is not in lowest terms")
    if p == 0 and q != 1:
        raise ParseError(f"zero must be written 0/1, got {s!r}")
    return Fraction(p, q)


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class BigMag:
    """Positive value m * 2**e with m odd; e may be huge."""

    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int = 0):
        if m <= 0:
            raise ValueError("BigMag is for positive values only")
        while m % 2 == 0:
            m //= 2
            e += 1
        self.m = m
        self.e = e

    @classmethod
    def from_int(cls, v: int) -> "BigMag":
        return cls(v, 0)

    def to_int(self) -> int:
        if self.e < 0 or self.e + self.m.bit_length() > INT_BIT_LIMIT:
            raise MagnitudeOverflow(f"2-exponent {self.e} too large to materialize")
        return self.m << self.e

    def mul(self, other: "BigMag") -> "BigMag":
        return BigMag(self.m * other.m, self.e + other.e)

    def pow(self, k: int) -> "BigMag":
        if k < 0:
            raise ValueError("negative power of a magnitude")
        return BigMag(self.m ** k, self.e * k)

    def cmp(self, other: "BigMag") -> int:
        # compare m1*2**e1 vs m2*2**e2 without shifting by huge amounts
        if self.e == other.e:
            a, b = self.m, other.m
        elif self.e > other.e:
            d = self.e - other.e
            if d >= other.m.bit_length():  # 2**d alone exceeds other.m
                return 1
            a, b = self.m << d, other.m
        else:
            d = other.e - self.e
            if d >= self.m.bit_length():
                return -1
            a, b = self.m, other.m << d
        return (a > b) - (a < b)

    def __repr__(self):
        return f"BigMag({self.m}*2^{self.e})"
