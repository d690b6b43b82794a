"""Term evaluation and oracles backed by exact finite-dimensional algebras."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from ..exactnum import GR, Dyadic, dyadic_sqrt, sqrt_bounds
from ..oracle import PairOracle, SpectralGapFunction
from ..termalg import (
    ZERO_TERM,
    Adj,
    AdjointStructure,
    Comb,
    Gen,
    Prod,
    Term,
    average,
    generators_of,
    scale,
    substitute,
)
from .algebra import BlockMatrix, MultiMatrixAlgebra
from .linalg import solve
from .subalgebra import SubalgebraSpec, certify_gap, contraction_witness, norm2_exact


class UnassignedGenerator(LookupError):
    pass


def eval_term(t: Term, assignment: Sequence[BlockMatrix]) -> BlockMatrix:
    """Exact value of ``t`` with ``Gen(i)`` read as ``assignment[i]``."""
    if isinstance(t, Gen):
        if t.index >= len(assignment):
            raise UnassignedGenerator(f"generator {t.index} is not assigned")
        return assignment[t.index]
    if isinstance(t, Comb):
        x = eval_term(t.left, assignment)
        y = eval_term(t.right, assignment)
        if not t.mu:
            return x.scale(t.lam)
        if not t.lam:
            return y.scale(t.mu)
        return x.scale(t.lam) + y.scale(t.mu)
    if isinstance(t, Prod):
        return eval_term(t.left, assignment) * eval_term(t.right, assignment)
    if isinstance(t, Adj):
        return eval_term(t.inner, assignment).adj()
    raise TypeError(f"not a term: {t!r}")


def unit_ball_violations(assignment: Sequence[BlockMatrix]) -> list[tuple[int, tuple]]:
    """``(generator index, psd witness)`` for every generator with operator norm above 1."""
    out = []
    for i, a in enumerate(assignment):
        w = contraction_witness(a)
        if w is not None:
            out.append((i, w))
    return out


def check_assignment(assignment: Sequence[BlockMatrix], algebra: MultiMatrixAlgebra | None = None):
    if algebra is not None:
        for i, a in enumerate(assignment):
            if a.algebra.dims != algebra.dims:
                raise ValueError(f"generator {i} has block shape {a.algebra.dims}, expected {algebra.dims}")
    bad = unit_ball_violations(assignment)
    if bad:
        i, w = bad[0]
        raise ValueError(f"generator {i} is not a contraction (1 - a*a fails: {w})")


class FindimNormOracle:
    """Exact 2-norms of evaluated terms, rounded down to ``2^-(k+1)``."""

    def __init__(self, assignment: Sequence[BlockMatrix], validate: bool = True):
        self.assignment = list(assignment)
        if validate:
            check_assignment(self.assignment)

    def value(self, term: Term) -> BlockMatrix:
        return eval_term(term, self.assignment)

    def norm(self, term: Term, k: int) -> Dyadic:
        return norm2_exact(self.value(term), k)


class PerturbedNormOracle(FindimNormOracle):
    """Answers that wander inside the ``2^-k`` tolerance, deterministically per query.

    Used to check that consumers rely only on the stated contract.
    """

    def __init__(self, assignment, salt: str = "", validate: bool = True):
        super().__init__(assignment, validate)
        self.salt = salt

    def norm(self, term: Term, k: int) -> Dyadic:
        lo, hi = sqrt_bounds(self.value(term).norm2_sq(), k + 4)
        h = hashlib.sha256(f"{self.salt}|{term!r}|{k}".encode()).digest()
        # lo is within 2^-(k+4) below the norm; an offset of at most 14 such steps keeps the error under 2^-k
        steps = (int.from_bytes(h[:4], "big") % 29) - 14
        out = lo + Dyadic(steps, -(k + 4))
        if out < 0:
            out = Dyadic(0)
        return out


class TermInclusion:
    """Exact inclusion ``N† -> M#`` given the M-term of each N-generator."""

    def __init__(self, images: Sequence[Term]):
        self.images = list(images)

    def include(self, term: Term, k: int) -> Term:
        for i in generators_of(term):
            if i >= len(self.images):
                raise ValueError(f"N-generator {i} is outside the presentation")
        return substitute(term, self.images)


@dataclass
class FindimPair:
    """A concrete pair ``N ⊆ M`` with its presentations, exact values and oracle."""

    algebra: MultiMatrixAlgebra
    m_assignment: list[BlockMatrix]
    n_images: list[Term]
    n_adjoint: AdjointStructure
    subalgebra: SubalgebraSpec
    oracle: PairOracle

    def m_value(self, term: Term) -> BlockMatrix:
        return eval_term(term, self.m_assignment)

    def n_value(self, term: Term) -> BlockMatrix:
        return eval_term(substitute(term, self.n_images), self.m_assignment)

    @property
    def n_generators(self) -> list[BlockMatrix]:
        return [self.m_value(t) for t in self.n_images]

    def distance_sq(self, m_term: Term) -> mpq:
        return self.subalgebra.distance_sq(self.m_value(m_term))

    def distance(self, m_term: Term, k: int) -> Dyadic:
        return dyadic_sqrt(self.distance_sq(m_term), k)

    def expectation(self, m_term: Term) -> BlockMatrix:
        return self.subalgebra.expectation(self.m_value(m_term))

    def distance_estimator(self):
        """``(term, l) -> d(term, N)`` within ``2^-l``, from exact values."""
        return lambda term, l: self.distance(term, l)

    def expectation_estimator(self):
        """``(term, k) -> N†`` rational point equal to ``E_N(term)``, via :func:`element_as_term`."""
        n_spec = SubalgebraSpec(
            self.algebra,
            self.n_generators,
            [Gen(i) for i in range(len(self.n_images))],
        )

        def expect(term: Term, k: int) -> Term:
            return element_as_term(self.expectation(term), n_spec)

        return expect


def findim_pair_oracle(
    algebra: MultiMatrixAlgebra,
    assignment: Sequence[BlockMatrix],
    n_generators: Sequence[Term | BlockMatrix],
    n_adjoint: AdjointStructure | None = None,
    norm_oracle=None,
) -> FindimPair:
    """Build the exact oracle for ``N ⊆ M``.

    N-generators given as matrices are appended to the M-generator list so that
    the inclusion is exact term substitution (error 0).
    """
    m_assignment = list(assignment)
    images: list[Term] = []
    for g in n_generators:
        if isinstance(g, BlockMatrix):
            m_assignment.append(g)
            images.append(Gen(len(m_assignment) - 1))
        else:
            images.append(g)
    check_assignment(m_assignment, algebra)
    n_values = [eval_term(t, m_assignment) for t in images]
    if n_adjoint is None:
        n_adjoint = infer_adjoint_structure(n_values)
    elif n_adjoint.count != len(images):
        raise ValueError("adjoint structure does not match the number of N-generators")
    else:
        verify_adjoint_structure(n_values, n_adjoint)
    spec = SubalgebraSpec(algebra, n_values, images)
    norms = norm_oracle if norm_oracle is not None else FindimNormOracle(m_assignment, validate=False)
    oracle = PairOracle(
        norms=norms,
        inclusion=TermInclusion(images),
        n_generator_count=len(images),
        n_adjoint=n_adjoint,
        m_generator_count=len(m_assignment),
    )
    return FindimPair(algebra, m_assignment, images, n_adjoint, spec, oracle)


def infer_adjoint_structure(values: Sequence[BlockMatrix]) -> AdjointStructure:
    """Self-adjoint generators map to themselves; others must be followed by their adjoint."""
    inv: list[int] = []
    i = 0
    while i < len(values):
        v = values[i]
        if v.is_hermitian():
            inv.append(i)
            i += 1
        elif i + 1 < len(values) and values[i + 1] == v.adj():
            inv.extend([i + 1, i])
            i += 2
        else:
            raise ValueError(
                f"generator {i} is neither self-adjoint nor followed by its adjoint; "
                "the presentation is not adjoint-closed"
            )
    return AdjointStructure(tuple(inv))


def verify_adjoint_structure(values: Sequence[BlockMatrix], adj: AdjointStructure):
    for i, j in enumerate(adj.involution):
        if values[j] != values[i].adj():
            raise ValueError(f"declared adjoint of generator {i} is generator {j}, but the matrices disagree")


class NotRepresentable(ValueError):
    """The element is not a rounded combination of the subalgebra's word basis."""


def element_as_term(x: BlockMatrix, n: SubalgebraSpec) -> Term:
    """An exact term over ``n``'s generators denoting ``x``.

    Writes ``x = sum c_j w_j`` in the word basis and nests rounded combinations
    with weights ``s_j >= |c_j|``; succeeds when ``sum s_j <= 1``.
    """
    if not n.contains(x):
        raise NotRepresentable("element is not in the subalgebra")
    words = n.words
    cols = [w.to_vector() for w in words]
    rows = [[cols[j][r] for j in range(len(words))] for r in range(len(cols[0]))]
    coeffs = solve(rows, x.to_vector())
    if coeffs is None:
        raise NotRepresentable("element is not in the span of the word basis")
    live = [(c, t) for c, t in zip(coeffs, n.word_terms) if c]
    if not live:
        # the zero combination of the first generator
        return ZERO_TERM
    if any(t is None for _, t in live):
        raise NotRepresentable("the unit is not a rational point of this presentation")
    bounds = []
    for c, _ in live:
        lo, hi = sqrt_bounds(c.abs2(), 40)
        bounds.append(hi.to_rational())
    total = sum(bounds, mpq(0))
    if len(live) == 1:
        c, t = live[0]
        if c.abs2() > 1:
            raise NotRepresentable(f"coefficient {c} exceeds the unit ball")
        return scale(c, t)
    if total > 1:
        raise NotRepresentable(f"coefficient mass {total} exceeds 1")
    leaves = [scale(c / s, t) for (c, t), s in zip(live, bounds)]
    return scale(GR(total), average(leaves, bounds))


def certified_gap_function(pair: FindimPair) -> SpectralGapFunction | None:
    """A spectral gap function backed by an exact gap certificate for the N-generators.

    With ``sum_i ||[p, a_i]||_2^2 >= lam d(p, N' ∩ M)^2`` and a window covering
    every generator, ``f(n) = n + c`` works once ``4^c lam >= count``.
    """
    cert = certify_gap(pair.subalgebra)
    if cert is None:
        return None
    c = cert.offset()
    floor = len(pair.n_images) - 1
    return SpectralGapFunction(lambda n: max(floor, n + c), f"max({floor}, n+{c}) [lam={cert.lam}]")
