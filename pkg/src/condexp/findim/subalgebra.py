"""Unital *-subalgebras, exact conditional expectations, commutants and spectral gap certificates."""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from ..exactnum import GR, Dyadic, dyadic_sqrt
from ..termalg import Adj, Gen, Prod, Term
from .algebra import BlockMatrix, MultiMatrixAlgebra
from .linalg import ldl_witness, nullspace


def psd_witness(x: BlockMatrix):
    """``None`` if ``x`` is positive semidefinite, else ``(block, kind, index, value)``."""
    if not x.is_hermitian():
        raise ValueError("psd_check needs a Hermitian element")
    for b in range(len(x.re)):
        w = ldl_witness(x.block_rows(b))
        if w is not None:
            return (b,) + w
    return None


def psd_check(x: BlockMatrix) -> bool:
    return psd_witness(x) is None


def contraction_witness(a: BlockMatrix):
    """Witness that ``1 - a* a`` fails to be PSD, i.e. ``a`` leaves the unit ball."""
    return psd_witness(a.algebra.identity() - a.adj() * a)


def is_contraction(a: BlockMatrix) -> bool:
    return contraction_witness(a) is None


def norm2_exact(x: BlockMatrix, k: int) -> Dyadic:
    """``||x||_2`` within ``2^-k``."""
    return dyadic_sqrt(x.norm2_sq(), k)


class SubalgebraSpec:
    """The unital *-subalgebra generated by ``generators``.

    Closure multiplies the current word basis by the generators and their
    adjoints until the span stops growing; the basis is kept orthogonal for
    the trace inner product as it is built.  When ``terms`` are supplied, each
    basis word remembers the term that produces it.
    """

    def __init__(
        self,
        algebra: MultiMatrixAlgebra,
        generators: Sequence[BlockMatrix],
        terms: Sequence[Term] | None = None,
    ):
        self.algebra = algebra
        self.generators = list(generators)
        if terms is None:
            terms = [Gen(i) for i in range(len(self.generators))]
        self.generator_terms = list(terms)
        # orthogonal basis e_j with <e_j, e_j>
        self.orthogonal: list[tuple[BlockMatrix, mpq]] = []
        # original (non-orthogonalised) basis words and their terms
        self.words: list[BlockMatrix] = []
        self.word_terms: list[Term | None] = []
        self._close()

    def _absorb(self, v: BlockMatrix, term) -> bool:
        r = v
        for e, n in self.orthogonal:
            c = e.inner(r)
            if c:
                r = r - e.scale(c / n)
        if r.is_zero():
            return False
        self.orthogonal.append((r, r.norm2_sq()))
        self.words.append(v)
        self.word_terms.append(term)
        return True

    def _close(self):
        letters: list[tuple[BlockMatrix, Term]] = []
        for g, t in zip(self.generators, self.generator_terms):
            letters.append((g, t))
            letters.append((g.adj(), Adj(t)))
        frontier = []
        for g, t in letters:
            if self._absorb(g, t):
                frontier.append((g, t))
        while frontier:
            nxt = []
            for w, wt in frontier:
                for g, t in letters:
                    p = w * g
                    pt = Prod(wt, t)
                    if self._absorb(p, pt):
                        nxt.append((p, pt))
            frontier = nxt
        self.unital_by_words = self._residual(self.algebra.identity()).is_zero()
        if not self.unital_by_words:
            self._absorb(self.algebra.identity(), None)

    def _residual(self, x: BlockMatrix) -> BlockMatrix:
        r = x
        for e, n in self.orthogonal:
            c = e.inner(r)
            if c:
                r = r - e.scale(c / n)
        return r

    @property
    def dim(self) -> int:
        return len(self.orthogonal)

    @property
    def basis(self) -> list[BlockMatrix]:
        return list(self.words)

    def contains(self, x: BlockMatrix) -> bool:
        return self._residual(x).is_zero()

    def expectation(self, x: BlockMatrix) -> BlockMatrix:
        """Trace-orthogonal projection of ``x`` onto the subalgebra."""
        out = self.algebra.zero()
        for e, n in self.orthogonal:
            c = e.inner(x)
            if c:
                out = out + e.scale(c / n)
        return out

    def distance_sq(self, x: BlockMatrix) -> mpq:
        return (x - self.expectation(x)).norm2_sq()


def conditional_expectation_exact(x: BlockMatrix, n: SubalgebraSpec) -> BlockMatrix:
    return n.expectation(x)


def distance_exact(x: BlockMatrix, n: SubalgebraSpec, k: int) -> Dyadic:
    """``||x - E_N(x)||_2`` within ``2^-k``."""
    return dyadic_sqrt(n.distance_sq(x), k)


def commutant(n: SubalgebraSpec | Sequence[BlockMatrix], algebra: MultiMatrixAlgebra | None = None):
    """Basis of the relative commutant ``N' ∩ M`` (exact nullspace)."""
    if isinstance(n, SubalgebraSpec):
        algebra = n.algebra
        gens = n.generators + [g.adj() for g in n.generators]
    else:
        gens = list(n)
        if algebra is None:
            if not gens:
                raise ValueError("need the ambient algebra when no generators are given")
            algebra = gens[0].algebra
    units = algebra.basis()
    dim = algebra.vector_dim
    if not gens:
        return units
    cols = [[u.commutator(g).to_vector() for g in gens] for u in units]
    rows = []
    for gi in range(len(gens)):
        for coord in range(dim):
            row = [cols[c][gi][coord] for c in range(dim)]
            if any(row):
                rows.append(row)
    return [algebra.from_vector(v) for v in nullspace(rows, dim)]


def _weighted_gram(algebra: MultiMatrixAlgebra, maps: Sequence[list[list[GR]]]) -> list[list[GR]]:
    """``sum_a A_a^* W A_a`` for coordinate matrices ``A_a``."""
    dim = algebra.vector_dim
    w = algebra.coordinate_weights()
    out = [[GR(0)] * dim for _ in range(dim)]
    for a in maps:
        for i in range(dim):
            for j in range(i, dim):
                s = GR(0)
                for r in range(dim):
                    x, y = a[r][i], a[r][j]
                    if x and y:
                        s = s + x.conj() * y * w[r]
                if s:
                    out[i][j] = out[i][j] + s
                    if i != j:
                        out[j][i] = out[j][i] + s.conj()
    return out


class GapCertificate:
    """Exact lower bound ``lam`` with ``sum_i ||[p, a_i]||_2^2 >= lam * d(p, N' ∩ M)^2`` for all ``p``."""

    def __init__(self, lam: mpq, generator_count: int):
        self.lam = lam
        self.generator_count = generator_count

    def offset(self) -> int:
        """Smallest ``c >= 0`` with ``4^c >= count / lam``."""
        c = 0
        while mpq(4) ** c * self.lam < self.generator_count:
            c += 1
        return c

    def __repr__(self):
        return f"GapCertificate(lam={self.lam}, generators={self.generator_count})"


def certify_gap(n: SubalgebraSpec, max_halvings: int = 64) -> GapCertificate | None:
    """Certify a spectral gap constant for the presentation ``n.generators`` of ``N``.

    The quadratic form ``p -> sum_i ||[p, a_i]||_2^2`` vanishes exactly on the
    commutant of the generators; this searches dyadic ``lam`` from large to
    small and returns the first one with ``G - lam (1 - P) >= 0``, where ``P``
    is the trace-orthogonal projection onto ``N' ∩ M``.  ``None`` means the
    generators' commutant is strictly larger than ``N' ∩ M`` (the generator
    list is not adjoint-closed enough) or no gap was found.
    """
    algebra = n.algebra
    dim = algebra.vector_dim
    units = algebra.basis()
    gens = n.generators
    maps = []
    for g in gens:
        cols = [u.commutator(g).to_vector() for u in units]
        maps.append([[cols[c][r] for c in range(dim)] for r in range(dim)])
    gram = _weighted_gram(algebra, maps)
    w = algebra.coordinate_weights()
    # W P = sum_j W e_j e_j^* W / <e_j, e_j>, with e_j an orthogonal basis of N' ∩ M
    rel = commutant(n)
    ortho: list[tuple[list[GR], mpq]] = []
    for v in rel:
        r = v
        for e, nn in ortho:
            c = algebra.from_vector(e).inner(r)
            if c:
                r = r - algebra.from_vector(e).scale(c / nn)
        if not r.is_zero():
            ortho.append((r.to_vector(), r.norm2_sq()))
    wp = [[GR(0)] * dim for _ in range(dim)]
    for e, nn in ortho:
        we = [x * w[i] for i, x in enumerate(e)]
        for i in range(dim):
            if not we[i]:
                continue
            for j in range(dim):
                if we[j]:
                    wp[i][j] = wp[i][j] + we[i] * we[j].conj() / nn
    # the commutant of the generators must coincide with N' ∩ M
    for v in nullspace([row for m in maps for row in m if any(row)], dim):
        if not n_commutes(algebra.from_vector(v), n):
            return None
    top = max((x.re for row in gram for x in row if x.re > 0), default=mpq(0))
    if not top or dim == len(ortho):
        # the commutant is everything: any gap constant works vacuously
        return GapCertificate(mpq(1), max(len(gens), 1))
    lam = mpq(1)
    while lam < top * dim:
        lam *= 2
    for _ in range(max_halvings):
        h = [
            [gram[i][j] - (GR(w[i]) - wp[i][j] if i == j else -wp[i][j]) * lam for j in range(dim)]
            for i in range(dim)
        ]
        if ldl_witness(h) is None:
            return GapCertificate(lam, max(len(gens), 1))
        lam /= 2
    return None


def n_commutes(x: BlockMatrix, n: SubalgebraSpec) -> bool:
    return all(x.commutator(g).is_zero() and x.commutator(g.adj()).is_zero() for g in n.generators)
