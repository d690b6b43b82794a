"""Nearest-unitary rounding with an exactly unitary output and an exact distance bound.

The numeric polar factor only proposes a unitary.  It is converted to an
exactly unitary matrix by rounding its Cayley parameter (a Hermitian matrix)
to dyadic entries and mapping back, so unitarity never depends on floating
point.  The reported bound is re-derived from exact arithmetic.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpq

from ..exactnum import GR, Dyadic, sqrt_bounds
from .algebra import BlockMatrix, _zeros
from .linalg import inverse, matmul

# phases tried for the Cayley chart, so that -1 stays away from the spectrum
_PHASES = [GR(1), GR(0, 1), GR(-1), GR(0, -1), GR(mpq(3, 5), mpq(4, 5)), GR(mpq(-3, 5), mpq(4, 5)),
           GR(mpq(3, 5), mpq(-4, 5)), GR(mpq(-3, 5), mpq(-4, 5))]


def is_unitary(u: BlockMatrix) -> bool:
    one = u.algebra.identity()
    return u.adj() * u == one and u * u.adj() == one


def _numeric_polar(block: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(block)
    return w @ vh


def _round_dyadic(x: float, bits: int) -> mpq:
    return mpq(int(round(x * (1 << bits))), 1 << bits)


def _exact_cayley_block(v: np.ndarray, bits: int) -> list[list[GR]]:
    d = v.shape[0]
    eye = np.eye(d)
    best = None
    for omega in _PHASES:
        w = complex(omega).conjugate() * v
        gap = np.min(np.abs(np.linalg.eigvals(w) + 1))
        if best is None or gap > best[0]:
            best = (gap, omega, w)
        if gap > 0.5:
            break
    _, omega, w = best
    h = -1j * (eye - w) @ np.linalg.inv(eye + w)
    h = (h + h.conj().T) / 2
    hq = [[GR(0)] * d for _ in range(d)]
    for i in range(d):
        hq[i][i] = GR(_round_dyadic(h[i, i].real, bits))
        for j in range(i + 1, d):
            z = GR(_round_dyadic(h[i, j].real, bits), _round_dyadic(h[i, j].imag, bits))
            hq[i][j] = z
            hq[j][i] = z.conj()
    i_unit = GR(0, 1)
    plus = [[(GR(1) if r == c else GR(0)) + i_unit * hq[r][c] for c in range(d)] for r in range(d)]
    minus = [[(GR(1) if r == c else GR(0)) - i_unit * hq[r][c] for c in range(d)] for r in range(d)]
    u = matmul(minus, inverse(plus))
    return [[omega * z for z in row] for row in u]


def polar_round_unitary(u: BlockMatrix, bits: int = 40) -> tuple[BlockMatrix, Dyadic]:
    """An exactly unitary ``u'`` near the polar part of ``u`` and a dyadic ``bound >= ||u - u'||_2``.

    A unitary input is returned unchanged with bound 0.
    """
    if is_unitary(u):
        return u, Dyadic(0)
    re, im = [], []
    for block in u.to_complex():
        exact = _exact_cayley_block(_numeric_polar(block), bits)
        d = len(exact)
        br, bi = _zeros(d), _zeros(d)
        for r in range(d):
            for c in range(d):
                br[r, c] = exact[r][c].re
                bi[r, c] = exact[r][c].im
        re.append(br)
        im.append(bi)
    out = BlockMatrix(u.algebra, re, im)
    _, hi = sqrt_bounds((u - out).norm2_sq(), bits // 2)
    return out, hi


def unitarity_defect_sq(u: BlockMatrix) -> mpq:
    """``||u u* - 1||_2^2``, exact."""
    return (u * u.adj() - u.algebra.identity()).norm2_sq()


def polar_bound_holds(u: BlockMatrix, u_prime: BlockMatrix, slack_bits: int = 20) -> bool:
    """Exact check of ``||u - u'||_2 <= ||u u* - 1||_2 + 2^-slack_bits``."""
    lo, _ = sqrt_bounds(unitarity_defect_sq(u), slack_bits + 8)
    rhs = lo.to_rational() + mpq(1, 1 << slack_bits)
    return (u - u_prime).norm2_sq() <= rhs * rhs
