"""A computable bijection between the naturals and well-formed terms.

Layout of a code ``n``: the tag ``n % 4`` picks the constructor and ``n // 4``
codes its arguments through the Cantor pairing::

    0  Gen(n // 4)
    1  Comb: n // 4 = pair(coefficient code, pair(left, right))
    2  Prod: n // 4 = pair(left, right)
    3  Adj:  n // 4 = inner

Coefficient codes enumerate the admissible pairs ``(lam, mu)`` with
``|lam| + |mu| <= 1``: even codes walk ``|lam| < 1`` (paired with the disc of
radius ``1 - |lam|``), odd codes walk the unit circle with ``mu = 0``.  Each of
those Gaussian-rational sets is listed by reduced denominator, so encoding a
coefficient costs time polynomial in its denominator.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

from gmpy2 import mpq

from ..exactnum import GR, GaussianRational
from .terms import Adj, Comb, Gen, IllFormedTerm, Prod, Term, generators_of, is_rounded


def pair(x: int, y: int) -> int:
    """Cantor pairing."""
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def denominator(z: GaussianRational) -> int:
    a = int(z.re.denominator)
    b = int(z.im.denominator)
    return a * b // gcd(a, b)


class _BandedSequence:
    """Infinite list of Gaussian rationals, band ``d`` holding reduced denominator ``d``."""

    def __init__(self, band):
        self._band = band
        self._items: list[GaussianRational] = []
        self._cum = [0]
        self._pos: dict[GaussianRational, int] = {}

    def _grow(self):
        d = len(self._cum)
        for z in self._band(d):
            self._pos[z] = len(self._items)
            self._items.append(z)
        self._cum.append(len(self._items))

    def __getitem__(self, i: int) -> GaussianRational:
        while len(self._items) <= i:
            self._grow()
        return self._items[i]

    def index(self, z: GaussianRational) -> int:
        d = denominator(z)
        while len(self._cum) <= d:
            self._grow()
        try:
            return self._pos[z]
        except KeyError:
            raise IllFormedTerm(f"{z} is not in this coefficient set") from None


@lru_cache(maxsize=256)
def _lattice(d: int) -> tuple[tuple[int, int], ...]:
    # reduced numerators (a, b) over d, smallest modulus first
    pts = [
        (a, b)
        for a in range(-d, d + 1)
        for b in range(-d, d + 1)
        if a * a + b * b <= d * d and gcd(gcd(a, b), d) == 1
    ]
    pts.sort(key=lambda ab: (ab[0] * ab[0] + ab[1] * ab[1], ab[0], ab[1]))
    return tuple(pts)


def _open_disc_band(d: int):
    dd = d * d
    return [GR(mpq(a, d), mpq(b, d)) for a, b in _lattice(d) if a * a + b * b < dd]


def _circle_band(d: int):
    dd = d * d
    return [GR(mpq(a, d), mpq(b, d)) for a, b in _lattice(d) if a * a + b * b == dd]


_OPEN_DISC = _BandedSequence(_open_disc_band)
_CIRCLE = _BandedSequence(_circle_band)


@lru_cache(maxsize=4096)
def _partners(lam: GaussianRational) -> _BandedSequence:
    def band(d):
        out = []
        for a, b in _lattice(d):
            mu = GR(mpq(a, d), mpq(b, d))
            if is_rounded(lam, mu):
                out.append(mu)
        return out

    return _BandedSequence(band)


@lru_cache(maxsize=1 << 16)
def decode_coefficients(c: int) -> tuple[GaussianRational, GaussianRational]:
    if c < 0:
        raise ValueError("codes are naturals")
    if c % 2 == 0:
        i, j = unpair(c // 2)
        lam = _OPEN_DISC[i]
        return lam, _partners(lam)[j]
    return _CIRCLE[(c - 1) // 2], GR(0)


def encode_coefficients(lam: GaussianRational, mu: GaussianRational) -> int:
    if not is_rounded(lam, mu):
        raise IllFormedTerm(f"|{lam}| + |{mu}| exceeds 1")
    if lam.abs2() == 1:
        return 2 * _CIRCLE.index(lam) + 1
    return 2 * pair(_OPEN_DISC.index(lam), _partners(lam).index(mu))


@lru_cache(maxsize=1 << 18)
def decode(code: int) -> Term:
    """The term with the given code; total on the naturals, ``decode(0) == Gen(0)``."""
    if not isinstance(code, int) or code < 0:
        raise ValueError(f"term codes are naturals, got {code!r}")
    tag, rest = code % 4, code // 4
    if tag == 0:
        return Gen(rest)
    if tag == 1:
        c, lr = unpair(rest)
        left, right = unpair(lr)
        lam, mu = decode_coefficients(c)
        return Comb(lam, decode(left), mu, decode(right))
    if tag == 2:
        left, right = unpair(rest)
        return Prod(decode(left), decode(right))
    return Adj(decode(rest))


def encode(t: Term) -> int:
    """Inverse of :func:`decode`. Rejects combinations outside the unit ball."""
    if isinstance(t, Gen):
        return 4 * t.index
    if isinstance(t, Comb):
        c = encode_coefficients(t.lam, t.mu)
        return 4 * pair(c, pair(encode(t.left), encode(t.right))) + 1
    if isinstance(t, Prod):
        return 4 * pair(encode(t.left), encode(t.right)) + 2
    if isinstance(t, Adj):
        return 4 * encode(t.inner) + 3
    raise TypeError(f"not a term: {t!r}")


def terms_over(generator_count: int | None, start: int = 0):
    """Yield ``(code, term)`` in code order, skipping terms that use absent generators."""
    code = start
    while True:
        t = decode(code)
        if generator_count is None or max(generators_of(t)) < generator_count:
            yield code, t
        code += 1


__all__ = [
    "pair",
    "unpair",
    "encode",
    "decode",
    "encode_coefficients",
    "decode_coefficients",
    "terms_over",
    "denominator",
]
