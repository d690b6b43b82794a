"""Passing between distance and expectation oracles, and expectations from a Pimsner-Popa basis."""

from __future__ import annotations

from typing import Callable, Sequence

from gmpy2 import mpq

from ..exactnum import GR, Dyadic
from ..oracle import ComputablePoint, PairOracle, pair_distance
from ..termalg import Prod, Term, average, half_difference, scale, terms_over, unpair
from .search import NPointCache

DistanceEstimator = Callable[[Term, int], Dyadic]
ExpectationEstimator = Callable[[Term, int], Term]


class SearchExhausted(RuntimeError):
    """A budgeted search ran out of steps before finding an acceptable point."""

    def __init__(self, message: str, steps: int):
        super().__init__(message)
        self.steps = steps


def internal_precision(k: int) -> int:
    """Precision at which distances are read when hunting for ``E_N(p)`` to ``2^-k``.

    With errors ``e = 2^-l`` on ``d(p, p')`` and ``d(p, N)`` (both at most 1),
    the Pythagorean bound gives ``d(E_N p, p')^2 <= (D1 + e)^2 - (D0 - e)^2``;
    at the exact expectation this is at most ``8e``, and ``8 * 2^-(2k+4) < 4^-k``.
    """
    return 2 * k + 4


def expectation_from_distance(
    oracle: PairOracle, dist: DistanceEstimator, p: Term, k: int, budget: int
) -> Term:
    """A rational point ``p'`` of ``N`` with ``d(E_N(p), p') < 2^-k``.

    By Pythagoras ``d(p, p')^2 = d(p, N)^2 + d(E_N(p), p')^2``, so a candidate is
    accepted when the upper estimate of the first minus the lower estimate of
    the second is below ``4^-k``.  Candidates are the ``N``-rational points in
    code order; ``budget`` bounds how many are tried.
    """
    l = internal_precision(k)
    e = mpq(1, 1 << l)
    d0 = dist(p, l).to_rational()
    d0_lo = max(d0 - e, mpq(0))
    target = mpq(1, 1 << (2 * k))
    steps = 0
    for _, q in terms_over(oracle.n_generator_count):
        if steps >= budget:
            break
        steps += 1
        d1 = pair_distance(oracle, p, q, l).to_rational()
        if (d1 + e) ** 2 - d0_lo**2 < target:
            return q
    raise SearchExhausted(f"no rational point of N accepted within {budget} candidates", steps)


def distance_from_expectation(oracle: PairOracle, expect: ExpectationEstimator, p: Term, k: int) -> Dyadic:
    """``d(p, N)`` within ``2^-k`` as ``d(p, q)`` for ``q`` within ``2^-(k+1)`` of ``E_N(p)``.

    ``|d(p, q) - d(p, N)| <= d(q, E_N p) < 2^-(k+1)`` and the distance itself is
    read at ``k + 2``.
    """
    q = expect(p, k + 1)
    return pair_distance(oracle, p, q, k + 2)


def _tuple(index: int, length: int) -> tuple[int, ...]:
    """The ``index``-th tuple of naturals of the given length (iterated unpairing)."""
    out = []
    for _ in range(length - 1):
        a, index = unpair(index)
        out.append(a)
    out.append(index)
    return tuple(out)


def pimsner_popa_expectation(
    oracle: PairOracle,
    basis: Sequence[ComputablePoint],
    basis_expectations: Sequence[ComputablePoint],
    p: Term,
    k: int,
    budget: int,
) -> Term:
    """``E_N(p)`` within ``2^-k`` from a basis with ``x = sum_j m_j E_N(m_j* x)``.

    First finds ``N``-points ``p_j`` with ``||sum m_j p_j - p||_2 < 2^-(k+1)``,
    then a rational point of ``N`` within ``2^-(k+1)`` of ``sum E_N(m_j) p_j``;
    contractivity of ``E_N`` closes the bound.  Sums are carried as averages
    ``(1/n) sum`` so that every intermediate is a rational point.
    """
    n = len(basis)
    if n == 0 or len(basis_expectations) != n:
        raise ValueError("need a non-empty basis with one expectation per element")
    weight = GR(mpq(1, n))
    # precision for the basis points and their expectations: n terms each off by 2^-a
    a = k + 5 + n.bit_length()
    ms = [m(a) for m in basis]
    es = [oracle.include(ex(a), a) for ex in basis_expectations]
    points = NPointCache(oracle.n_generator_count)
    steps = 0

    def within(avg: Term, ref: Term, bound_exp: int) -> bool:
        # ||avg - ref/n||_2 < 2^-bound_exp / n, read through a half difference
        q = bound_exp + 2 + n.bit_length() + 2
        est = oracle.norm(half_difference(avg, scale(weight, ref)), q).to_rational()
        return n * 2 * (est + mpq(1, 1 << q)) < mpq(1, 1 << bound_exp)

    chosen = None
    idx = 0
    while steps < budget:
        steps += 1
        combo = _tuple(idx, n)
        idx += 1
        ps = [oracle.include(points[c], a) for c in combo]
        avg = average([Prod(m, x) for m, x in zip(ms, ps)])
        # approximation errors in the basis and inclusions add at most 4n 2^-a <= 2^-(k+3)
        if within(avg, p, k + 2):
            chosen = ps
            break
    if chosen is None:
        raise SearchExhausted(f"no basis coefficients found within {budget} steps", steps)
    target_avg = average([Prod(e, x) for e, x in zip(es, chosen)])
    for _, q in terms_over(oracle.n_generator_count):
        if steps >= budget:
            break
        steps += 1
        if within(target_avg, oracle.include(q, a), k + 2):
            return q
    raise SearchExhausted(f"no rational point of N near the recombined expectation within {budget} steps", steps)
