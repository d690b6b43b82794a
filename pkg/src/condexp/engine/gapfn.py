"""Spectral gap functions from Kazhdan data."""

from __future__ import annotations

from ..oracle import KazhdanData, SpectralGapFunction
from ..termalg import AdjointStructure, commutator_bound_j, decode, generators_of


def kazhdan_points(kd: KazhdanData, adj: AdjointStructure):
    """The rational points among the first ``kd.m`` codes that the presentation can express."""
    out = []
    for code in range(kd.m):
        t = decode(code)
        if all(i < adj.count for i in generators_of(t)):
            out.append(t)
    return out


def spectral_gap_fn_from_kazhdan(kd: KazhdanData, adj: AdjointStructure) -> SpectralGapFunction:
    """``f(n) = max_{code < m} j(code, n + p)`` over the expressible rational points."""
    points = kazhdan_points(kd, adj)
    if not points:
        raise ValueError("none of the first m codes is a rational point of this presentation")
    missing = [c for c in kd.set_codes if any(i >= adj.count for i in generators_of(decode(c)))]
    if missing:
        raise ValueError(f"Kazhdan set codes {missing} use generators outside the presentation")

    def f(n: int) -> int:
        return max(commutator_bound_j(t, n + kd.p, adj) for t in points)

    return SpectralGapFunction(f, f"kazhdan(m={kd.m}, p={kd.p})")
