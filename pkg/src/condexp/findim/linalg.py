"""Exact linear algebra over Q(i) on plain lists of :class:`GaussianRational`."""

from __future__ import annotations

from typing import Sequence

from ..exactnum import GR, GaussianRational

Matrix = list[list[GaussianRational]]

_ZERO = GR(0)
_ONE = GR(1)


def rref(rows: Sequence[Sequence[GaussianRational]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = _ONE / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def nullspace(rows: Sequence[Sequence[GaussianRational]], ncols: int) -> Matrix:
    """Basis of ``{v : A v = 0}`` for the matrix with the given rows."""
    if not rows:
        return [[_ONE if i == j else _ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [_ZERO] * ncols
        v[f] = _ONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence[GaussianRational]], b: Sequence[GaussianRational]):
    """Some solution of ``A x = b``, or ``None`` when the system is inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [_ZERO] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def inverse(a: Sequence[Sequence[GaussianRational]]) -> Matrix:
    n = len(a)
    aug = [list(row) + [_ONE if i == j else _ZERO for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), _ZERO) for col in bt] for row in a]


def conj_transpose(a: Matrix) -> Matrix:
    return [[a[j][i].conj() for j in range(len(a))] for i in range(len(a[0]))]


def ldl_witness(h: Sequence[Sequence[GaussianRational]]):
    """Exact PSD test for a Hermitian matrix by symmetric Gaussian elimination.

    Returns ``None`` when the matrix is positive semidefinite, otherwise a
    witness ``(kind, index, value)``: a negative pivot, or a nonzero entry in
    the row of a zero pivot.
    """
    n = len(h)
    for i in range(n):
        if len(h[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i, n):
            if h[i][j] != h[j][i].conj():
                raise ValueError("matrix is not Hermitian")
    a = [list(r) for r in h]
    alive = list(range(n))
    while alive:
        for i in alive:
            if a[i][i].re < 0:
                return ("negative pivot", i, a[i][i])
        piv = next((i for i in alive if a[i][i].re > 0), None)
        if piv is None:
            for i in alive:
                for j in alive:
                    if a[i][j]:
                        return ("zero pivot with nonzero coupling", i, a[i][j])
            return None
        p = a[piv][piv].re
        alive.remove(piv)
        row = a[piv]
        for i in alive:
            f = a[i][piv]
            if f:
                scale = f / p
                ai = a[i]
                for j in alive:
                    if row[j]:
                        ai[j] = ai[j] - scale * row[j]
    return None


def is_psd(h) -> bool:
    return ldl_witness(h) is None
