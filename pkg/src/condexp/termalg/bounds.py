"""Adjoint bookkeeping for generator sequences and the structural commutator bound ``j``.

Window convention used throughout the package: a window ``J`` constrains the
generators ``a_0, ..., a_J`` (indices up to and including ``J``), clamped to
however many generators the presentation declares.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .coding import decode
from .terms import Adj, Comb, Gen, Prod, Term


@dataclass(frozen=True)
class AdjointStructure:
    """The involution ``i -> i*`` on generator indices."""

    involution: tuple[int, ...]

    def __post_init__(self):
        inv = self.involution
        n = len(inv)
        for i, j in enumerate(inv):
            if not 0 <= j < n or inv[j] != i:
                raise ValueError(f"not an involution at index {i}: {inv}")

    @property
    def count(self) -> int:
        return len(self.involution)

    def __getitem__(self, i: int) -> int:
        return self.involution[i]

    @classmethod
    def all_self_adjoint(cls, count: int) -> "AdjointStructure":
        return cls(tuple(range(count)))


def adjoint_close(declarations: Sequence[str]) -> AdjointStructure:
    """Build the generator involution from slot declarations.

    Each entry is ``"self"`` (one self-adjoint generator) or ``"pair"`` (two
    consecutive generators, the second being the adjoint of the first).

    >>> adjoint_close(["pair"]).involution
    (1, 0)
    >>> adjoint_close(["self", "pair", "self"]).involution
    (0, 2, 1, 3)
    """
    inv: list[int] = []
    for kind in declarations:
        i = len(inv)
        if kind == "self":
            inv.append(i)
        elif kind == "pair":
            inv.extend([i + 1, i])
        else:
            raise ValueError(f"unknown adjoint declaration {kind!r}; use 'self' or 'pair'")
    return AdjointStructure(tuple(inv))


def _leaf_profile(t: Term, adj: AdjointStructure, conj: bool) -> tuple[int, int]:
    """(leaf cost, largest generator index reached) with adjoints pushed to the leaves.

    Cost recursion: unit-ball factors give ``|[x, st]| <= |[x, s]| + |[x, t]|``;
    a rounded combination costs at most the larger of its live branches.
    A cost of 0 means the term denotes 0.
    """
    if isinstance(t, Gen):
        if t.index >= adj.count:
            raise ValueError(f"generator {t.index} is outside the presentation ({adj.count} generators)")
        return 1, adj[t.index] if conj else t.index
    if isinstance(t, Adj):
        return _leaf_profile(t.inner, adj, not conj)
    if isinstance(t, Prod):
        cl, il = _leaf_profile(t.left, adj, conj)
        cr, ir = _leaf_profile(t.right, adj, conj)
        if cl == 0 or cr == 0:
            # the product is 0
            return 0, max(il, ir)
        return cl + cr, max(il, ir)
    if isinstance(t, Comb):
        cost, idx = 0, -1
        cl, il = _leaf_profile(t.left, adj, conj)
        cr, ir = _leaf_profile(t.right, adj, conj)
        if t.lam:
            cost, idx = cl, il
        if t.mu:
            cost, idx = max(cost, cr), max(idx, ir)
        return cost, max(idx, il, ir)
    raise TypeError(f"not a term: {t!r}")


def leaf_cost(t: Term, adj: AdjointStructure) -> int:
    return _leaf_profile(t, adj, False)[0]


def commutator_bound_j(m: int | Term, k: int, adj: AdjointStructure) -> int:
    """A window/precision ``J`` such that small commutators with ``a_0..a_J`` control ``[x, p]``.

    If ``max_{i <= J} |[x, a_i]|_2 < 2^-J`` then ``|[x, p]|_2 < 2^-k`` where ``p``
    is the term coded by ``m`` (or ``m`` itself), for any tracial algebra and
    any assignment of unit-ball elements to the generators.
    """
    if k < 0:
        raise ValueError("precision exponent must be non-negative")
    t = decode(m) if isinstance(m, int) else m
    cost, top = _leaf_profile(t, adj, False)
    if cost == 0:
        return 0
    return max(top, k + (cost - 1).bit_length())
