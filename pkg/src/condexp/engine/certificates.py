"""The commutator certificate: psi, f' and the lower bounds it certifies.

A rational point ``u`` that is nearly unitary, nearly commutes with the first
generators of ``N`` and fails to commute with ``b`` by about ``2r`` certifies
``d(b, N) >= r - 2^-k`` once ``psi < 2^-f'(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from ..exactnum import Dyadic, rational, sqrt_bounds, truncated_sub
from ..oracle import PairOracle, SpectralGapFunction
from ..termalg import Adj, Gen, Prod, Term, half_commutator


@dataclass(frozen=True)
class CertificateParams:
    """Distance level ``r > 0`` and window ``m`` (generators ``a_0 .. a_m``)."""

    r: mpq
    m: int

    def __post_init__(self):
        object.__setattr__(self, "r", rational(self.r))
        if self.r <= 0:
            raise ValueError("the distance level r must be positive")
        if self.m < 0:
            raise ValueError("the window m must be a natural")


def g(k: int) -> int:
    """Rate for the nearest-unitary step: ``||uu* - 1||_2 < 2^-g(k)`` puts a unitary within ``2^-k``."""
    return k


def fprime(f: SpectralGapFunction, n: int) -> int:
    """``f(g(n + 2) + 1)``, i.e. ``f(n + 3)``."""
    return f(g(n + 2) + 1)


def _lo(x: Dyadic, e: mpq) -> mpq:
    return max(x.to_rational() - e, mpq(0))


def unitarity_defect(oracle: PairOracle, u: Term, k: int) -> Dyadic:
    """``||uu* - 1||_2`` within ``2^-k`` using only norm queries.

    ``||uu* - 1||_2^2 = ||uu*||_2^2 - 2||u||_2^2 + 1`` by the trace property, so
    no unit term is needed.  Both norms are queried at ``2k + 10`` and the
    square root of the resulting interval is narrow enough.
    """
    q = 2 * k + 10
    e = mpq(1, 1 << q)
    a = oracle.norm(Prod(u, Adj(u)), q)
    b = oracle.norm(u, q)
    # norms of unit-ball elements are at most 1
    a_hi = min(a.to_rational() + e, mpq(1))
    b_hi = min(b.to_rational() + e, mpq(1))
    lo = _lo(a, e) ** 2 - 2 * b_hi**2 + 1
    hi = a_hi**2 - 2 * _lo(b, e) ** 2 + 1
    s_lo, _ = sqrt_bounds(max(lo, mpq(0)), k + 3)
    _, s_hi = sqrt_bounds(max(hi, mpq(0)), k + 3)
    return Dyadic.floor((s_lo.to_rational() + s_hi.to_rational()) / 2, k + 3)


def commutator_norm(oracle: PairOracle, u: Term, x: Term, k: int) -> Dyadic:
    """``||[u, x]||_2`` within ``2^-k`` for M-terms ``u, x``."""
    return oracle.norm(half_commutator(u, x), k + 1).shift(1)


def included_commutator_norm(oracle: PairOracle, u: Term, n_index: int, k: int) -> Dyadic:
    """``||[u, a_i]||_2`` within ``2^-k`` where ``a_i`` is the ``i``-th N-generator.

    Inclusion at ``k + 2`` moves the commutator by at most ``2 * 2^-(k+2)``.
    """
    a = oracle.include(Gen(n_index), k + 2)
    return oracle.norm(half_commutator(u, a), k + 2).shift(1)


def psi_components(oracle: PairOracle, u: Term, b: Term, params: CertificateParams, k: int) -> dict:
    """The three components, each within ``2^-(k+2)``."""
    unitary = unitarity_defect(oracle, u, k + 2)
    comms = [included_commutator_norm(oracle, u, i, k + 2) for i in oracle.window(params.m)]
    cb = commutator_norm(oracle, u, b, k + 2)
    return {
        "unitarity": unitary,
        "commutators": comms,
        "target_commutator": cb,
        "gap": truncated_sub(2 * params.r, cb.to_rational()),
    }


def psi(oracle: PairOracle, u: Term, b: Term, params: CertificateParams, k: int) -> Dyadic:
    """``max(||uu*-1||, max_i ||[u, a_i]||, 2r ⊖ ||[u, b]||)`` within ``2^-k``."""
    c = psi_components(oracle, u, b, params, k)
    vals = [c["unitarity"].to_rational(), c["gap"]] + [x.to_rational() for x in c["commutators"]]
    return Dyadic.floor(max(vals), k + 3)


@dataclass(frozen=True)
class LowerBound:
    r: mpq
    bound: mpq
    witness: Term
    psi_value: Dyadic


def certify_lower_bound(
    oracle: PairOracle, u: Term, b: Term, r, f: SpectralGapFunction, k: int
) -> LowerBound | None:
    """Check ``psi_{r, f'(k)}(u) < 2^-f'(k)`` from an estimate at ``f'(k) + 1``.

    On success ``d(b, N) > r - 2^-k``.
    """
    fk = fprime(f, k)
    params = CertificateParams(r, fk)
    v = psi(oracle, u, b, params, fk + 1)
    if v.to_rational() <= mpq(1, 1 << (fk + 1)):
        return LowerBound(params.r, params.r - mpq(1, 1 << k), u, v)
    return None


def best_level(oracle: PairOracle, u: Term, b: Term, fk: int) -> mpq | None:
    """Largest level ``r`` on the ``2^-(fk+5)`` grid that ``u`` can hope to certify.

    Chosen so that ``2r - ||[u, b]||_2 <= 2^-(fk+2)``: the certificate then
    tolerates the estimation error of psi while ``r`` can exceed ``||[u,b]||_2 / 2``.
    """
    c = commutator_norm(oracle, u, b, fk + 4).to_rational()
    r = Dyadic.floor((c + mpq(3, 1 << (fk + 4))) / 2, fk + 5).to_rational()
    return r if r > 0 else None
