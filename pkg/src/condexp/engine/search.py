"""Two-machine search for ``d(b, N)``: certified lower bounds against witnessed upper bounds.

Termination needs the ambient algebra to be existentially closed, which no
finite-dimensional instance is, so every search runs under a step budget and
may honestly report :class:`BudgetExhausted`.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Iterator, Union

from gmpy2 import mpq

from ..exactnum import Dyadic, format_rational
from ..oracle import PairOracle, SpectralGapFunction, pair_distance
from ..termalg import Term, encode, terms_over, unpair
from .certificates import best_level, certify_lower_bound, fprime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certified:
    value: Dyadic
    k: int
    lower: mpq
    upper: mpq
    queries_spent: int
    log: tuple[str, ...] = field(default=(), compare=False)

    @property
    def status(self) -> str:
        return "Certified"


@dataclass(frozen=True)
class BudgetExhausted:
    lower: Dyadic
    upper: Dyadic
    queries_spent: int
    log: tuple[str, ...] = field(default=(), compare=False)

    @property
    def status(self) -> str:
        return "BudgetExhausted"


DistanceResult = Union[Certified, BudgetExhausted]


@dataclass(frozen=True)
class Emission:
    kind: str  # "LB" or "UB"
    bound: mpq
    r: mpq | None = None
    term: Term | None = None

    def line(self) -> str:
        if self.kind == "LB":
            return f"LB r={format_rational(self.r)} bound={format_rational(self.bound)} witness={encode(self.term)}"
        return f"UB point={encode(self.term)} bound={format_rational(self.bound)}"


class NPointCache:
    """Random access into the enumeration of ``N``-rational points."""

    def __init__(self, generator_count: int | None):
        self._it = terms_over(generator_count)
        self._items: list[Term] = []

    def __getitem__(self, i: int) -> Term:
        while len(self._items) <= i:
            self._items.append(next(self._it)[1])
        return self._items[i]


def lower_bound_machine(
    oracle: PairOracle, b: Term, f: SpectralGapFunction, k: int, budget: int | None = None
) -> Iterator[Emission | None]:
    """One step per candidate ``u`` (M-rational points in code order).

    Yields an ``LB`` emission when the certificate succeeds, ``None`` otherwise.
    """
    fk = fprime(f, k)
    steps = 0
    for _, u in terms_over(oracle.m_generator_count):
        if budget is not None and steps >= budget:
            return
        steps += 1
        r = best_level(oracle, u, b, fk)
        cert = certify_lower_bound(oracle, u, b, r, f, k) if r is not None else None
        if cert is None:
            yield None
        else:
            yield Emission("LB", cert.bound, cert.r, u)


def upper_bound_machine(oracle: PairOracle, b: Term, k: int, budget: int | None = None) -> Iterator[Emission]:
    """One step per ``(point, extra precision)`` pair, dovetailed by Cantor unpairing.

    Each step emits ``d(b, p') + 2^-(k+2+e)``, a sound upper bound; letting
    the precision grow lets the bounds approach ``d(b, N)`` itself.
    """
    points = NPointCache(oracle.n_generator_count)
    t = 0
    while budget is None or t < budget:
        i, e = unpair(t)
        t += 1
        p = points[i]
        q = k + 2 + e
        est = pair_distance(oracle, b, p, q)
        yield Emission("UB", est.to_rational() + mpq(1, 1 << q), None, p)


class _State:
    def __init__(self, k: int, initial_upper: mpq):
        self.k = k
        self.lower = mpq(0)
        self.lower_r: mpq | None = None
        self.upper = initial_upper
        self.lines: list[str] = []

    def absorb(self, em: Emission | None) -> bool:
        if em is None:
            return False
        self.lines.append(em.line())
        if em.kind == "LB":
            if em.bound > self.lower:
                self.lower = em.bound
                self.lower_r = em.r
        elif em.bound < self.upper:
            self.upper = em.bound
        return self.accepts()

    def accepts(self) -> bool:
        return self.upper < self.lower + mpq(1, 1 << self.k)


def _exact_dyadic(q: mpq) -> Dyadic:
    den = int(q.denominator)
    if den & (den - 1):
        raise ValueError(f"{q} is not a dyadic rational")
    return Dyadic.floor(q, den.bit_length() - 1)


def _finish(state: _State, oracle: PairOracle | None, start_queries: int, accepted: bool) -> DistanceResult:
    # with no oracle, ``start_queries`` already is the number of queries spent
    spent = start_queries if oracle is None else oracle.queries - start_queries
    k = state.k
    if accepted:
        r = state.lower + mpq(1, 1 << k)
        state.lines.append(f"ACCEPT r={format_rational(r)} k={k}")
        value = _exact_dyadic(state.lower + mpq(1, 1 << (k + 1)))
        return Certified(value, k, state.lower, state.upper, spent, tuple(state.lines))
    return BudgetExhausted(
        _exact_dyadic(state.lower),
        _exact_dyadic(state.upper),
        spent,
        tuple(state.lines),
    )


def _initial_upper(oracle: PairOracle, b: Term, k: int) -> mpq:
    # the zero point of N is always available, so ||b||_2 bounds the distance
    return oracle.norm(b, k + 2).to_rational() + mpq(1, 1 << (k + 2))


def interleaved_distance(
    oracle: PairOracle,
    b: Term,
    f: SpectralGapFunction,
    k: int,
    budget: int,
    parallel: bool = False,
) -> DistanceResult:
    """``d(b, N)`` within ``2^-k`` or an honest interval after ``budget`` machine steps.

    The machines alternate one step each (lower first).  Acceptance happens as
    soon as the best upper bound is below the best certified lower bound plus
    ``2^-k``; the reported value is the midpoint of that window.
    """
    if k < 0 or budget < 0:
        raise ValueError("precision and budget must be naturals")
    if parallel:
        return _interleaved_parallel(oracle, b, f, k, budget)
    start = oracle.queries
    state = _State(k, _initial_upper(oracle, b, k))
    if state.accepts():
        return _finish(state, oracle, start, True)
    lower = lower_bound_machine(oracle, b, f, k)
    upper = upper_bound_machine(oracle, b, k)
    for step in range(budget):
        machine = lower if step % 2 == 0 else upper
        if state.absorb(next(machine, None)):
            log.debug("accepted after %d steps", step + 1)
            return _finish(state, oracle, start, True)
    return _finish(state, oracle, start, False)


class _CountingProxy:
    """Serializes oracle calls across threads and counts this machine's queries."""

    def __init__(self, oracle: PairOracle, lock: threading.Lock):
        self._oracle = oracle
        self._lock = lock
        self.count = 0

    def __getattr__(self, name):
        return getattr(self._oracle, name)

    def norm(self, term, k):
        with self._lock:
            self.count += 1
            return self._oracle.norm(term, k)

    def include(self, term, k):
        with self._lock:
            self.count += 1
            return self._oracle.include(term, k)


def _interleaved_parallel(oracle, b, f, k, budget) -> DistanceResult:
    """Machines on separate threads; the decision replays the reference alternation.

    Each thread records its emissions by step index; the main thread consumes
    them in the fixed order lower 0, upper 0, lower 1, ... so the result,
    including the query count of the consumed steps, matches the sequential run.
    """
    start = oracle.queries
    state = _State(k, _initial_upper(oracle, b, k))
    if state.accepts():
        return _finish(state, oracle, start, True)
    setup = oracle.queries - start
    lock = threading.Lock()
    stop = threading.Event()
    ready = threading.Condition()
    results: list[list] = [[], []]
    proxies = [_CountingProxy(oracle, lock), _CountingProxy(oracle, lock)]
    machines = [
        lower_bound_machine(proxies[0], b, f, k, (budget + 1) // 2),
        upper_bound_machine(proxies[1], b, k, budget // 2),
    ]

    def run(idx):
        before = 0
        try:
            for em in machines[idx]:
                used = proxies[idx].count - before
                before = proxies[idx].count
                with ready:
                    results[idx].append((em, used))
                    ready.notify_all()
                if stop.is_set():
                    break
        finally:
            with ready:
                results[idx].append((StopIteration, 0))
                ready.notify_all()

    threads = [threading.Thread(target=run, args=(i,), daemon=True) for i in (0, 1)]
    for t in threads:
        t.start()
    accepted = False
    spent = setup
    try:
        for step in range(budget):
            idx, pos = step % 2, step // 2
            with ready:
                ready.wait_for(lambda: len(results[idx]) > pos)
                em, used = results[idx][pos]
            if em is StopIteration:
                continue
            spent += used
            if state.absorb(em):
                accepted = True
                break
    finally:
        stop.set()
        for t in threads:
            t.join()
    return _finish(state, None, spent, accepted)
