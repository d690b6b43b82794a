"""Oracle contracts for a presented pair ``(M#, N†)``.

An oracle is modelled as a deterministic callable interface: 2-norm queries on
rational points of ``M#`` and the inclusion ``N† -> M#``, each answered to a
requested precision ``2^-k``.  Consumers must not assume answers at different
precisions are mutually consistent beyond their stated tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from .exactnum import Dyadic
from .termalg import AdjointStructure, Term, half_difference


class NormOracle(Protocol):
    def norm(self, term: Term, k: int) -> Dyadic:
        """A dyadic within ``2^-k`` of ``||term||_2``."""


class InclusionMap(Protocol):
    def include(self, term: Term, k: int) -> Term:
        """A rational point of ``M#`` within ``2^-k`` of the image of the ``N†`` point ``term``."""


@dataclass
class PairOracle:
    """All queries for one pair bundled into a single oracle, with a query counter."""

    norms: NormOracle
    inclusion: InclusionMap
    n_generator_count: int | None = None
    n_adjoint: AdjointStructure | None = None
    m_generator_count: int | None = None
    queries: int = field(default=0, compare=False)

    def norm(self, term: Term, k: int) -> Dyadic:
        if k < 0:
            raise ValueError("precision exponent must be non-negative")
        self.queries += 1
        return self.norms.norm(term, k)

    def include(self, term: Term, k: int) -> Term:
        if k < 0:
            raise ValueError("precision exponent must be non-negative")
        self.queries += 1
        return self.inclusion.include(term, k)

    def window(self, m: int) -> range:
        """N-generator indices constrained by window ``m`` (``a_0 .. a_m``, clamped)."""
        top = m + 1 if self.n_generator_count is None else min(m + 1, self.n_generator_count)
        return range(max(top, 0))


def pair_distance(oracle: PairOracle, m_term: Term, n_term: Term, k: int) -> Dyadic:
    """``d(m_term, i(n_term))`` within ``2^-k``.

    Inclusion at ``2^-(k+2)``, then the norm of ``(m - n')/2`` at ``2^-(k+3)``,
    doubled: total error below ``2^-(k+1)``.
    """
    image = oracle.include(n_term, k + 2)
    return oracle.norm(half_difference(m_term, image), k + 3).shift(1)


@dataclass(frozen=True)
class ComputablePoint:
    """A point given by approximants: ``approximant(k)`` is within ``2^-k`` of it."""

    approximant: Callable[[int], Term]

    def __call__(self, k: int) -> Term:
        return self.approximant(k)

    @classmethod
    def exact(cls, term: Term) -> "ComputablePoint":
        return cls(lambda k, _t=term: _t)


@dataclass(frozen=True)
class SpectralGapFunction:
    """``f`` such that ``max_{i <= f(n)} ||[p, a_i]||_2 < 2^-f(n)`` forces ``d(p, N' ∩ M) < 2^-n``.

    The guarantee is semantic; findim backends can certify it exactly.
    """

    fn: Callable[[int], int]
    label: str = "f"

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError("spectral gap functions take naturals")
        v = self.fn(n)
        if not isinstance(v, int) or v < 0:
            raise ValueError(f"{self.label}({n}) = {v!r} is not a natural")
        return v

    @classmethod
    def linear(cls, offset: int, floor: int = 0) -> "SpectralGapFunction":
        """``n -> max(floor, n + offset)``."""
        return cls(lambda n: max(floor, n + offset), f"max({floor}, n+{offset})")


@dataclass(frozen=True)
class KazhdanData:
    """A Kazhdan pair supplied as input: set ``F`` by term codes of ``N†``, ``K = 2^p``, ``eps = 2^-p``.

    Every code in ``F`` must lie among the first ``m`` codes.
    """

    set_codes: tuple[int, ...]
    m: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "set_codes", tuple(int(c) for c in self.set_codes))
        if self.m < 1 or self.p < 0:
            raise ValueError("Kazhdan data needs m >= 1 and p >= 0")
        bad = [c for c in self.set_codes if not 0 <= c < self.m]
        if bad:
            raise ValueError(f"Kazhdan set codes {bad} are not among the first {self.m} rational points")
