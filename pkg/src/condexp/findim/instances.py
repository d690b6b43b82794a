"""Concrete pairs used by tests, the acceptance suite and the sample problems."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from ..exactnum import GR
from ..termalg import ZERO_TERM, Comb, Gen, Prod, Term
from .algebra import BlockMatrix, MultiMatrixAlgebra, direct_sum, kron
from .backend import FindimPair, findim_pair_oracle
from .linalg import inverse, matmul
from .subalgebra import SubalgebraSpec

M2 = MultiMatrixAlgebra.matrix(2)


def pauli() -> dict[str, BlockMatrix]:
    return {
        "1": M2.identity(),
        "x": M2.element([[[0, 1], [1, 0]]]),
        "y": M2.element([[[0, "-i"], ["i", 0]]]),
        "z": M2.element([[[1, 0], [0, -1]]]),
    }


@dataclass
class Instance:
    """A pair plus the target and whatever extra terms an experiment needs."""

    pair: FindimPair
    target: Term
    notes: dict = field(default_factory=dict)


def tensor_instance() -> Instance:
    """``M = M_2 (x) M_2``, ``N = M_2 (x) 1``, target ``1 (x) sigma_z`` at distance 1."""
    s = pauli()
    m4 = MultiMatrixAlgebra.matrix(4)
    gens = [
        kron(s["x"], s["1"], m4),
        kron(s["z"], s["1"], m4),
        kron(s["1"], s["x"], m4),
        kron(s["1"], s["z"], m4),
    ]
    pair = findim_pair_oracle(m4, gens, [Gen(0), Gen(1)])
    return Instance(pair, Gen(3), {"witness": Gen(2), "identity": Prod(Gen(1), Gen(1))})


def central_instance() -> Instance:
    """``N`` diagonally inside ``M_2 (+) M_2``; the target is the central ``(1, -1)``.

    ``N' ∩ M`` is the centre of ``M``; the target is a unit at distance 1 from
    ``N`` and commutes with every unitary, so no commutator certificate exists.
    """
    s = pauli()
    alg = MultiMatrixAlgebra([(2, mpq(1, 4)), (2, mpq(1, 4))])
    gens = [
        direct_sum([s["x"], s["x"]], alg),
        direct_sum([s["z"], s["z"]], alg),
        direct_sum([s["1"], -s["1"]], alg),
    ]
    pair = findim_pair_oracle(alg, gens, [Gen(0), Gen(1)])
    return Instance(pair, Gen(2))


def diagonal_instance() -> Instance:
    """``N`` = diagonal matrices in ``M_2``, presented by ``e_11`` and ``sigma_z``.

    The Pimsner-Popa basis ``{1, sigma_x}`` has ``E(1) = 1`` and ``E(sigma_x) = 0``.
    """
    s = pauli()
    gens = [M2.matrix_unit(0, 0, 0), s["z"], s["x"]]
    pair = findim_pair_oracle(M2, gens, [Gen(0), Gen(1)])
    one = Prod(Gen(1), Gen(1))
    return Instance(
        pair,
        Gen(0),
        {
            "basis": [one, Gen(2)],
            "basis_expectations": [one, ZERO_TERM],
        },
    )


# random families


def random_gaussian(rng: random.Random, spread: int = 4, denom: int = 4, real: bool = False) -> GR:
    re = mpq(rng.randint(-spread, spread), rng.randint(1, denom))
    im = mpq(0) if real else mpq(rng.randint(-spread, spread), rng.randint(1, denom))
    return GR(re, im)


def _block_entry_bound(x: BlockMatrix) -> mpq:
    # the sum of |re| + |im| over a block dominates its operator norm
    best = mpq(0)
    for ar, ai in zip(x.re, x.im):
        s = sum((abs(v) for v in ar.flat), mpq(0)) + sum((abs(v) for v in ai.flat), mpq(0))
        best = max(best, s)
    return best


def to_contraction(x: BlockMatrix, slack: mpq = mpq(0)) -> BlockMatrix:
    """``x`` scaled by an exact rational so that its operator norm is at most 1."""
    s = _block_entry_bound(x) + slack
    if s <= 1:
        return x
    return x.scale(GR(1 / s))


def random_element(rng: random.Random, algebra: MultiMatrixAlgebra, hermitian: bool = False) -> BlockMatrix:
    blocks = []
    for d in algebra.dims:
        rows = [[random_gaussian(rng) for _ in range(d)] for _ in range(d)]
        if hermitian:
            for i in range(d):
                rows[i][i] = GR(rows[i][i].re)
                for j in range(i):
                    rows[i][j] = rows[j][i].conj()
        blocks.append(rows)
    return algebra.element(blocks)


def random_contraction(rng: random.Random, algebra: MultiMatrixAlgebra, hermitian: bool = False) -> BlockMatrix:
    return to_contraction(random_element(rng, algebra, hermitian))


def random_rational_unitary(rng: random.Random, d: int) -> list[list[GR]]:
    """Cayley transform ``(1 - iH)(1 + iH)^-1`` of a small random Hermitian ``H``."""
    h = [[GR(0)] * d for _ in range(d)]
    for i in range(d):
        h[i][i] = GR(rng.randint(-2, 2))
        for j in range(i + 1, d):
            z = GR(rng.randint(-1, 1), rng.randint(-1, 1))
            h[i][j] = z
            h[j][i] = z.conj()
    iu = GR(0, 1)
    plus = [[(GR(1) if r == c else GR(0)) + iu * h[r][c] for c in range(d)] for r in range(d)]
    minus = [[(GR(1) if r == c else GR(0)) - iu * h[r][c] for c in range(d)] for r in range(d)]
    return matmul(minus, inverse(plus))


def _conjugate(rows: list[list[GR]], w: list[list[GR]]) -> list[list[GR]]:
    wstar = [[w[j][i].conj() for j in range(len(w))] for i in range(len(w))]
    return matmul(matmul(w, rows), wstar)


def _pattern_element(rng: random.Random, d: int, kind: str, hermitian: bool) -> list[list[GR]]:
    """Random element of a standard subalgebra of ``M_d``."""
    rows = [[GR(0)] * d for _ in range(d)]
    if kind == "full":
        cells = [(i, j) for i in range(d) for j in range(d)]
    elif kind == "scalar":
        c = random_gaussian(rng, real=hermitian)
        return [[c if i == j else GR(0) for j in range(d)] for i in range(d)]
    elif kind == "diagonal":
        cells = [(i, i) for i in range(d)]
    elif kind.startswith("blocks"):
        sizes = [int(s) for s in kind.split(":")[1].split(",")]
        cells, start = [], 0
        for n in sizes:
            cells += [(start + i, start + j) for i in range(n) for j in range(n)]
            start += n
    elif kind.startswith("tensor"):
        # A (x) 1_m with A in M_n
        n = int(kind.split(":")[1])
        m = d // n
        a = [[random_gaussian(rng) for _ in range(n)] for _ in range(n)]
        if hermitian:
            a = _hermitize(a)
        for i in range(n):
            for j in range(n):
                for t in range(m):
                    rows[i * m + t][j * m + t] = a[i][j]
        return rows
    else:
        raise ValueError(f"unknown pattern {kind}")
    for i, j in cells:
        rows[i][j] = random_gaussian(rng)
    return _hermitize(rows) if hermitian else rows


def _hermitize(rows):
    d = len(rows)
    out = [list(r) for r in rows]
    for i in range(d):
        out[i][i] = GR(out[i][i].re)
        for j in range(i):
            out[i][j] = out[j][i].conj()
    return out


def _patterns_for(d: int) -> list[str]:
    pats = ["full", "scalar", "diagonal"]
    for cut in range(1, d):
        pats.append(f"blocks:{cut},{d - cut}")
    for n in range(2, d):
        if d % n == 0:
            pats.append(f"tensor:{n}")
    return pats


def random_algebra(rng: random.Random, max_total_dim: int = 6) -> MultiMatrixAlgebra:
    """Random block structure with ``sum(dims) <= max_total_dim`` and a random normalized trace."""
    dims: list[int] = []
    budget = max_total_dim
    while budget > 0 and (not dims or rng.random() < 0.5):
        d = rng.randint(1, min(budget, 4))
        dims.append(d)
        budget -= d
    raw = [mpq(rng.randint(1, 3)) for _ in dims]
    total = sum((w * d for w, d in zip(raw, dims)), mpq(0))
    return MultiMatrixAlgebra([(d, w / total) for d, w in zip(dims, raw)])


def random_subalgebra_generators(
    rng: random.Random, algebra: MultiMatrixAlgebra, count: int = 2, with_pair: bool = False
) -> list[BlockMatrix]:
    """Contractions generating a conjugated standard subalgebra, adjoint-closed by construction.

    Blocks of equal size may be tied together (diagonal embedding twisted by a
    rational unitary), which produces non-factor inclusions across blocks.
    """
    dims = algebra.dims
    kinds = [rng.choice(_patterns_for(d)) for d in dims]
    twists = [random_rational_unitary(rng, d) for d in dims]
    ties: dict[int, int] = {}
    for b in range(1, len(dims)):
        prev = [a for a in range(b) if dims[a] == dims[b] and a not in ties]
        if prev and rng.random() < 0.5:
            ties[b] = prev[0]
            kinds[b] = kinds[prev[0]]
    hermitian = [True] * count
    if with_pair:
        hermitian += [False]
    out: list[BlockMatrix] = []
    for herm in hermitian:
        blocks: list = [None] * len(dims)
        for b, d in enumerate(dims):
            if b in ties:
                continue
            blocks[b] = _pattern_element(rng, d, kinds[b], herm)
        for b, src in ties.items():
            blocks[b] = blocks[src]
        blocks = [_conjugate(rows, w) for rows, w in zip(blocks, twists)]
        x = to_contraction(algebra.element(blocks))
        out.append(x)
        if not herm:
            out.append(x.adj())
    return out


@dataclass
class RandomPair:
    """A random pair with an M-generator orthogonal to ``N`` at index ``orth``."""

    instance: Instance
    n_count: int
    orth: int
    seed: int


def random_pair(seed: int, max_total_dim: int = 6, extra_m: int = 1, with_pair: bool | None = None) -> RandomPair:
    """Random ``N ⊆ M``: N-generators first, then free contractions, then ``w ⊥ N``.

    The target is ``(a_0 + w) / 2`` whose expectation ``a_0 / 2`` is an early
    rational point of ``N``.
    """
    rng = random.Random(seed)
    alg = random_algebra(rng, max_total_dim)
    if with_pair is None:
        with_pair = rng.random() < 0.3
    n_gens = random_subalgebra_generators(rng, alg, count=rng.randint(1, 2), with_pair=with_pair)
    m_gens = list(n_gens)
    m_gens += [random_contraction(rng, alg) for _ in range(extra_m)]
    spec = SubalgebraSpec(alg, n_gens)
    x = random_element(rng, alg)
    w = x - spec.expectation(x)
    if w.is_zero():
        w = alg.zero()
    w = to_contraction(w)
    m_gens.append(w)
    orth = len(m_gens) - 1
    pair = findim_pair_oracle(alg, m_gens, [Gen(i) for i in range(len(n_gens))])
    target = Comb(GR(mpq(1, 2)), Gen(0), GR(mpq(1, 2)), Gen(orth))
    return RandomPair(Instance(pair, target), len(n_gens), orth, seed)


def near_commuting(rng: random.Random, gens: Sequence[BlockMatrix], commutant_basis, scale_exp: int) -> BlockMatrix:
    """Contraction ``c + 2^-scale_exp y`` with ``c`` in the commutant and ``y`` random."""
    algebra = gens[0].algebra
    c = algebra.zero()
    for v in commutant_basis:
        c = c + v.scale(random_gaussian(rng, spread=2, denom=2))
    y = random_contraction(rng, algebra)
    half = mpq(1, 2)
    if _block_entry_bound(c) > half:
        c = c.scale(GR(half / _block_entry_bound(c)))
    return c + y.scale(GR(mpq(1, 1 << (scale_exp + 1))))


def commutant_unitary(rng: random.Random, commutant_basis, algebra: MultiMatrixAlgebra) -> BlockMatrix:
    """Exact unitary ``(1 - iH)(1 + iH)^-1`` with ``H`` a random Hermitian element of the commutant."""
    h = algebra.zero()
    for v in commutant_basis:
        c = random_gaussian(rng, spread=2, denom=2, real=True)
        h = h + (v + v.adj()).scale(c * GR(mpq(1, 2)))
    iu = GR(0, 1)
    blocks = []
    for b, d in enumerate(algebra.dims):
        rows = h.block_rows(b)
        plus = [[(GR(1) if r == c else GR(0)) + iu * rows[r][c] for c in range(d)] for r in range(d)]
        minus = [[(GR(1) if r == c else GR(0)) - iu * rows[r][c] for c in range(d)] for r in range(d)]
        blocks.append(matmul(minus, inverse(plus)))
    return algebra.element(blocks)
