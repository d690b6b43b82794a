"""Exact scalars: rationals, Gaussian rationals, dyadics and certified square roots.

Rationals are carried as :class:`gmpy2.mpq`; every public helper accepts ints,
:class:`fractions.Fraction`, ``mpq`` or strings such as ``"3/4"``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import isqrt

from gmpy2 import mpq

__all__ = [
    "Q",
    "rational",
    "format_rational",
    "GaussianRational",
    "GR",
    "Dyadic",
    "truncated_sub",
    "dyadic_sqrt",
    "sqrt_bounds",
    "parse_gaussian",
]

Q = mpq

_MPQ = type(mpq(0))


def rational(x) -> mpq:
    """Coerce ``x`` to an exact rational. Floats are refused."""
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, Dyadic):
        return x.to_rational()
    if isinstance(x, str):
        s = x.strip()
        if not _RAT_RE.fullmatch(s):
            raise ValueError(f"not a rational literal: {x!r}")
        if "/" in s:
            p, q = s.split("/")
            if int(q) == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return mpq(int(p), int(q))
        return mpq(int(s))
    if type(x).__name__ == "mpz":
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


_RAT_RE = re.compile(r"[+-]?\d+(/\d+)?")


def format_rational(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


class GaussianRational:
    """An element ``re + im*i`` of Q(i), immutable and hashable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rational(re))
        object.__setattr__(self, "im", rational(im))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussianRational":
        z = object.__new__(cls)
        object.__setattr__(z, "re", re)
        object.__setattr__(z, "im", im)
        return z

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, str):
            return parse_gaussian(x)
        return cls._raw(rational(x), _ZERO_Q)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        n = other.abs2()
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conj(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def abs2(self) -> mpq:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        try:
            other = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GR({str(self)!r})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        im = self.im
        if not self.re:
            return f"{format_rational(im)}*i"
        sign = "-" if im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(im))}*i"

    def __complex__(self):
        return complex(float(self.re), float(self.im))


GR = GaussianRational
_ZERO_Q = mpq(0)

_TERM_RE = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?i)?")


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"p/q"``, ``"p/q*i"``, ``"p/q+r/s*i"``, ``"i"``, ``"-i"`` and friends."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Gaussian rational literal")
    re_part = mpq(0)
    im_part = mpq(0)
    pos = 0
    seen = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"malformed Gaussian rational: {text!r}")
        sign, mag, imag = m.groups()
        if seen and not sign:
            raise ValueError(f"malformed Gaussian rational: {text!r}")
        if mag is None and imag is None:
            raise ValueError(f"malformed Gaussian rational: {text!r}")
        if imag == "*i" and mag is None:
            raise ValueError(f"malformed Gaussian rational: {text!r}")
        value = rational(mag) if mag is not None else mpq(1)
        if sign == "-":
            value = -value
        if imag:
            im_part += value
        else:
            re_part += value
        pos = m.end()
        seen += 1
    if seen > 2:
        raise ValueError(f"malformed Gaussian rational: {text!r}")
    return GaussianRational._raw(re_part, im_part)


@total_ordering
class Dyadic:
    """``mantissa * 2**exponent`` in canonical form (odd mantissa, or zero with exponent 0)."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= tz
            exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def floor(cls, q, k: int) -> "Dyadic":
        """Largest multiple of ``2**-k`` that is <= q."""
        q = rational(q)
        num, den = int(q.numerator), int(q.denominator)
        if k >= 0:
            return cls((num << k) // den, -k)
        return cls(num // (den << -k), -k)

    @classmethod
    def ceil(cls, q, k: int) -> "Dyadic":
        return -cls.floor(-rational(q), k)

    def to_rational(self) -> mpq:
        if self.exponent >= 0:
            return mpq(self.mantissa << self.exponent)
        return mpq(self.mantissa, 1 << -self.exponent)

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def __add__(self, other):
        if isinstance(other, Dyadic):
            e = min(self.exponent, other.exponent)
            return Dyadic(
                (self.mantissa << (self.exponent - e)) + (other.mantissa << (other.exponent - e)), e
            )
        if isinstance(other, int):
            return self + Dyadic(other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (Dyadic, int)):
            return self + (-Dyadic(other) if isinstance(other, int) else -other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return Dyadic(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Dyadic):
            return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)
        if isinstance(other, int):
            return Dyadic(self.mantissa * other, self.exponent)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, s: int) -> "Dyadic":
        """Multiply by ``2**s``."""
        return Dyadic(self.mantissa, self.exponent + s)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        try:
            return self.to_rational() == rational(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Dyadic):
            other = other.to_rational()
        return self.to_rational() < rational(other)

    def __hash__(self):
        return hash(self.to_rational())

    def __float__(self):
        return float(self.to_rational())

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def __str__(self):
        return format_rational(self.to_rational())


def truncated_sub(r, s) -> mpq:
    """``max(r - s, 0)``."""
    d = rational(r) - rational(s)
    return d if d > 0 else mpq(0)


def _isqrt_floor(q: mpq, k: int) -> int:
    # floor(sqrt(q) * 2**k) == isqrt(floor(q * 4**k))
    scaled = (q.numerator << (2 * k)) // q.denominator
    return isqrt(int(scaled))


def dyadic_sqrt(q, k: int) -> Dyadic:
    """A dyadic within ``2**-k`` of ``sqrt(q)``, never negative and never above it.

    Exact whenever ``sqrt(q)`` is a multiple of ``2**-(k+1)``.
    """
    q = rational(q)
    if q < 0:
        raise ValueError(f"square root of negative rational {format_rational(q)}")
    if k < 0:
        raise ValueError("precision exponent must be non-negative")
    return Dyadic(_isqrt_floor(q, k + 1), -(k + 1))


def sqrt_bounds(q, k: int) -> tuple[Dyadic, Dyadic]:
    """Dyadics ``lo <= sqrt(q) <= hi`` with ``hi - lo <= 2**-k``; ``lo == hi`` when exact."""
    q = rational(q)
    if q < 0:
        raise ValueError(f"square root of negative rational {format_rational(q)}")
    m = _isqrt_floor(q, k)
    lo = Dyadic(m, -k)
    if lo.to_rational() ** 2 == q:
        return lo, lo
    return lo, Dyadic(m + 1, -k)
