"""Syntactic rational points: generators closed under rounded combinations, products, adjoints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..exactnum import GR, GaussianRational, rational


class IllFormedTerm(ValueError):
    """A combination node whose coefficients violate ``|lam| + |mu| <= 1``."""


def is_rounded(lam: GaussianRational, mu: GaussianRational) -> bool:
    """Decide ``|lam| + |mu| <= 1`` exactly from the squared moduli.

    With ``a = |lam|^2`` and ``b = |mu|^2`` the condition is ``b <= 1`` and
    ``2 sqrt(b) <= 1 + b - a``, i.e. ``t = 1 + b - a >= 0`` and ``4b <= t^2``.
    """
    a = lam.abs2()
    b = mu.abs2()
    if b > 1:
        return False
    t = 1 + b - a
    return t >= 0 and 4 * b <= t * t


@dataclass(frozen=True)
class Gen:
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise IllFormedTerm(f"generator index must be a natural, got {self.index!r}")


@dataclass(frozen=True)
class Comb:
    lam: GaussianRational
    left: "Term"
    mu: GaussianRational
    right: "Term"

    def __post_init__(self):
        object.__setattr__(self, "lam", GR.coerce(self.lam))
        object.__setattr__(self, "mu", GR.coerce(self.mu))
        if not is_rounded(self.lam, self.mu):
            raise IllFormedTerm(f"|{self.lam}| + |{self.mu}| exceeds 1")


@dataclass(frozen=True)
class Prod:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Adj:
    inner: "Term"


Term = Union[Gen, Comb, Prod, Adj]

ZERO_TERM = Comb(GR(0), Gen(0), GR(0), Gen(0))


def scale(c, t: Term) -> Comb:
    """``c * t`` as a rounded combination; needs ``|c| <= 1``."""
    return Comb(GR.coerce(c), t, GR(0), t)


def half_difference(s: Term, t: Term) -> Comb:
    """The rational point ``(s - t) / 2``; its 2-norm is half the distance."""
    return Comb(GR(rational(1) / 2), s, GR(rational(-1) / 2), t)


def half_commutator(s: Term, t: Term) -> Comb:
    """``(st - ts) / 2``."""
    return half_difference(Prod(s, t), Prod(t, s))


def average(terms, weights=None) -> Term:
    """Balanced tree of combinations denoting ``sum(w_j t_j) / sum(w_j)``.

    ``weights`` are positive rationals (all 1 by default); each node splits its
    mass proportionally, so every node is a rounded combination.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("average of no terms")
    weights = [rational(1)] * len(terms) if weights is None else [rational(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")

    def build(lo, hi):
        if hi - lo == 1:
            return terms[lo], weights[lo]
        mid = (lo + hi) // 2
        left, wl = build(lo, mid)
        right, wr = build(mid, hi)
        total = wl + wr
        return Comb(GR(wl / total), left, GR(wr / total), right), total

    return build(0, len(terms))[0]


def generators_of(t: Term) -> set[int]:
    """Indices of every generator occurring in ``t``."""
    out: set[int] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Gen):
            out.add(s.index)
        elif isinstance(s, Comb):
            stack.append(s.left)
            stack.append(s.right)
        elif isinstance(s, Prod):
            stack.append(s.left)
            stack.append(s.right)
        elif isinstance(s, Adj):
            stack.append(s.inner)
        else:
            raise TypeError(f"not a term: {s!r}")
    return out


def substitute(t: Term, images) -> Term:
    """Replace ``Gen(i)`` by ``images[i]`` throughout ``t``."""
    if isinstance(t, Gen):
        return images[t.index]
    if isinstance(t, Comb):
        return Comb(t.lam, substitute(t.left, images), t.mu, substitute(t.right, images))
    if isinstance(t, Prod):
        return Prod(substitute(t.left, images), substitute(t.right, images))
    if isinstance(t, Adj):
        return Adj(substitute(t.inner, images))
    raise TypeError(f"not a term: {t!r}")


def size(t: Term) -> int:
    """Number of internal (non-generator) nodes."""
    if isinstance(t, Gen):
        return 0
    if isinstance(t, (Comb, Prod)):
        return 1 + size(t.left) + size(t.right)
    return 1 + size(t.inner)
