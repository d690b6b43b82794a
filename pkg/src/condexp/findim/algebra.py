"""Multi-matrix algebras ``M = (+)_b M_{d_b}`` with trace ``tr(x) = sum_b w_b Tr(x_b)``.

Entries are Gaussian rationals held as separate real/imaginary object arrays of
``mpq`` so that numpy drives the loops while every operation stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from ..exactnum import GR, GaussianRational, rational

_Z = mpq(0)
_ONE = mpq(1)


def _zeros(d: int) -> np.ndarray:
    return np.full((d, d), _Z, dtype=object)


def _eye(d: int) -> np.ndarray:
    a = _zeros(d)
    for i in range(d):
        a[i, i] = _ONE
    return a


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    """Direct sum of full matrix blocks; ``blocks`` lists ``(dim, weight)`` pairs."""

    blocks: tuple[tuple[int, mpq], ...]

    def __init__(self, blocks: Iterable[tuple[int, object]], validate: bool = True):
        normalized = tuple((int(d), rational(w)) for d, w in blocks)
        object.__setattr__(self, "blocks", normalized)
        if not normalized:
            raise ValueError("an algebra needs at least one block")
        for d, w in normalized:
            if d < 1:
                raise ValueError(f"block dimension must be positive, got {d}")
            if w <= 0:
                raise ValueError(f"block weight must be positive, got {w}")
        if validate and self.normalization_defect():
            raise ValueError(
                f"trace is not normalized: sum of weight*dim is {self.trace_of_unit()}, expected 1"
            )

    @classmethod
    def matrix(cls, d: int) -> "MultiMatrixAlgebra":
        """``M_d`` with the normalized trace."""
        return cls([(d, mpq(1, d))])

    def trace_of_unit(self) -> mpq:
        return sum((w * d for d, w in self.blocks), _Z)

    def normalization_defect(self) -> mpq:
        return self.trace_of_unit() - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.blocks)

    @property
    def weights(self) -> tuple[mpq, ...]:
        return tuple(w for _, w in self.blocks)

    @property
    def vector_dim(self) -> int:
        return sum(d * d for d in self.dims)

    def zero(self) -> "BlockMatrix":
        return BlockMatrix(self, [_zeros(d) for d in self.dims], [_zeros(d) for d in self.dims])

    def identity(self) -> "BlockMatrix":
        return BlockMatrix(self, [_eye(d) for d in self.dims], [_zeros(d) for d in self.dims])

    def matrix_unit(self, b: int, i: int, j: int) -> "BlockMatrix":
        x = self.zero()
        x.re[b][i, j] = _ONE
        return x

    def basis(self) -> list["BlockMatrix"]:
        """Matrix units in coordinate order (block, row, column)."""
        return [
            self.matrix_unit(b, i, j)
            for b, d in enumerate(self.dims)
            for i in range(d)
            for j in range(d)
        ]

    def coordinate_weights(self) -> list[mpq]:
        return [w for d, w in self.blocks for _ in range(d * d)]

    def element(self, blocks: Sequence) -> "BlockMatrix":
        """Build an element from per-block nested lists of anything Gaussian-rational-like."""
        if len(blocks) != len(self.blocks):
            raise ValueError(f"expected {len(self.blocks)} blocks, got {len(blocks)}")
        re, im = [], []
        for (d, _), rows in zip(self.blocks, blocks):
            rows = list(rows)
            if len(rows) == d * d and not isinstance(rows[0], (list, tuple)):
                rows = [rows[r * d:(r + 1) * d] for r in range(d)]
            if len(rows) != d or any(len(r) != d for r in rows):
                raise ValueError(f"block of dimension {d} needs {d}x{d} entries")
            br, bi = _zeros(d), _zeros(d)
            for r, row in enumerate(rows):
                for c, entry in enumerate(row):
                    z = GR.coerce(entry)
                    br[r, c] = z.re
                    bi[r, c] = z.im
            re.append(br)
            im.append(bi)
        return BlockMatrix(self, re, im)

    def from_vector(self, vec: Sequence[GaussianRational]) -> "BlockMatrix":
        if len(vec) != self.vector_dim:
            raise ValueError("coordinate vector has the wrong length")
        re, im = [], []
        pos = 0
        for d in self.dims:
            br, bi = _zeros(d), _zeros(d)
            for i in range(d):
                for j in range(d):
                    z = vec[pos]
                    br[i, j] = z.re
                    bi[i, j] = z.im
                    pos += 1
            re.append(br)
            im.append(bi)
        return BlockMatrix(self, re, im)


class BlockMatrix:
    """An element of a :class:`MultiMatrixAlgebra`."""

    __slots__ = ("algebra", "re", "im")

    def __init__(self, algebra: MultiMatrixAlgebra, re, im):
        self.algebra = algebra
        self.re = list(re)
        self.im = list(im)

    def _check(self, other: "BlockMatrix"):
        if other.algebra.dims != self.algebra.dims:
            raise ValueError(f"dimension mismatch: {self.algebra.dims} vs {other.algebra.dims}")

    def copy(self) -> "BlockMatrix":
        return BlockMatrix(self.algebra, [a.copy() for a in self.re], [a.copy() for a in self.im])

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check(other)
        return BlockMatrix(
            self.algebra,
            [a + b for a, b in zip(self.re, other.re)],
            [a + b for a, b in zip(self.im, other.im)],
        )

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._check(other)
        return BlockMatrix(
            self.algebra,
            [a - b for a, b in zip(self.re, other.re)],
            [a - b for a, b in zip(self.im, other.im)],
        )

    def __neg__(self) -> "BlockMatrix":
        return BlockMatrix(self.algebra, [-a for a in self.re], [-a for a in self.im])

    def scale(self, c) -> "BlockMatrix":
        c = GR.coerce(c)
        cr, ci = c.re, c.im
        if not ci:
            return BlockMatrix(self.algebra, [a * cr for a in self.re], [a * cr for a in self.im])
        return BlockMatrix(
            self.algebra,
            [a * cr - b * ci for a, b in zip(self.re, self.im)],
            [a * ci + b * cr for a, b in zip(self.re, self.im)],
        )

    def __mul__(self, other):
        if isinstance(other, BlockMatrix):
            self._check(other)
            re, im = [], []
            for ar, ai, br, bi in zip(self.re, self.im, other.re, other.im):
                re.append(ar.dot(br) - ai.dot(bi))
                im.append(ar.dot(bi) + ai.dot(br))
            return BlockMatrix(self.algebra, re, im)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def adj(self) -> "BlockMatrix":
        return BlockMatrix(self.algebra, [a.T.copy() for a in self.re], [-a.T for a in self.im])

    def commutator(self, other: "BlockMatrix") -> "BlockMatrix":
        return self * other - other * self

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix) or other.algebra.dims != self.algebra.dims:
            return NotImplemented
        return all(bool((a == b).all()) for a, b in zip(self.re, other.re)) and all(
            bool((a == b).all()) for a, b in zip(self.im, other.im)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return all(not a.any() for a in self.re) and all(not a.any() for a in self.im)

    def is_hermitian(self) -> bool:
        return all(bool((a == a.T).all()) for a in self.re) and all(
            bool((a == -a.T).all()) for a in self.im
        )

    def entry(self, b: int, i: int, j: int) -> GaussianRational:
        return GR._raw(self.re[b][i, j], self.im[b][i, j])

    def block_rows(self, b: int) -> list[list[GaussianRational]]:
        d = self.algebra.dims[b]
        return [[self.entry(b, i, j) for j in range(d)] for i in range(d)]

    def to_vector(self) -> list[GaussianRational]:
        out = []
        for ar, ai in zip(self.re, self.im):
            out.extend(GR._raw(r, i) for r, i in zip(ar.flat, ai.flat))
        return out

    def trace(self) -> GaussianRational:
        re = _Z
        im = _Z
        for (d, w), ar, ai in zip(self.algebra.blocks, self.re, self.im):
            re += w * sum((ar[i, i] for i in range(d)), _Z)
            im += w * sum((ai[i, i] for i in range(d)), _Z)
        return GR._raw(re, im)

    def norm2_sq(self) -> mpq:
        """``tr(x* x)``, exact."""
        total = _Z
        for w, ar, ai in zip(self.algebra.weights, self.re, self.im):
            total += w * (sum((v * v for v in ar.flat), _Z) + sum((v * v for v in ai.flat), _Z))
        return total

    def inner(self, other: "BlockMatrix") -> GaussianRational:
        """``tr(self* other)``."""
        re = _Z
        im = _Z
        for w, xr, xi, yr, yi in zip(self.algebra.weights, self.re, self.im, other.re, other.im):
            re += w * sum(((xr * yr) + (xi * yi)).flat, _Z)
            im += w * sum(((xr * yi) - (xi * yr)).flat, _Z)
        return GR._raw(re, im)

    def to_complex(self) -> list[np.ndarray]:
        """Floating-point copy of each block (for numeric proposals only)."""
        return [
            np.array(ar, dtype=float) + 1j * np.array(ai, dtype=float)
            for ar, ai in zip(self.re, self.im)
        ]

    def __repr__(self):
        parts = []
        for b in range(len(self.re)):
            rows = ["[" + ", ".join(str(z) for z in row) + "]" for row in self.block_rows(b)]
            parts.append("[" + ", ".join(rows) + "]")
        return f"BlockMatrix({', '.join(parts)})"


def kron(x: BlockMatrix, y: BlockMatrix, algebra: MultiMatrixAlgebra | None = None) -> BlockMatrix:
    """Kronecker product of two single-block elements, landing in ``M_{d1 d2}``."""
    if len(x.re) != 1 or len(y.re) != 1:
        raise ValueError("kron is defined here for single-block factors")
    re = np.kron(x.re[0], y.re[0]) - np.kron(x.im[0], y.im[0])
    im = np.kron(x.re[0], y.im[0]) + np.kron(x.im[0], y.re[0])
    d = re.shape[0]
    alg = algebra or MultiMatrixAlgebra.matrix(d)
    return BlockMatrix(alg, [re.astype(object)], [im.astype(object)])


def direct_sum(parts: Sequence[BlockMatrix], algebra: MultiMatrixAlgebra) -> BlockMatrix:
    re, im = [], []
    for p in parts:
        re.extend(a.copy() for a in p.re)
        im.extend(a.copy() for a in p.im)
    x = BlockMatrix(algebra, re, im)
    if tuple(a.shape[0] for a in re) != algebra.dims:
        raise ValueError("direct summands do not match the algebra's blocks")
    return x
