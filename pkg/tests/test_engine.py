import itertools

import pytest
from gmpy2 import mpq

from condexp.engine import (
    BudgetExhausted,
    CertificateParams,
    Certified,
    SearchExhausted,
    best_level,
    certify_lower_bound,
    distance_from_expectation,
    expectation_from_distance,
    fprime,
    g,
    interleaved_distance,
    internal_precision,
    kazhdan_points,
    lower_bound_machine,
    pimsner_popa_expectation,
    psi,
    psi_components,
    spectral_gap_fn_from_kazhdan,
    unitarity_defect,
    upper_bound_machine,
)
from condexp.exactnum import GR
from condexp.findim import PerturbedNormOracle, certified_gap_function
from condexp.findim.instances import central_instance, diagonal_instance, random_pair, tensor_instance
from condexp.oracle import ComputablePoint, KazhdanData, PairOracle, SpectralGapFunction
from condexp.termalg import ZERO_TERM, AdjointStructure, Comb, Gen, Prod, adjoint_close, encode
from oracles import close_to_sqrt

HALF = GR(mpq(1, 2))


@pytest.fixture(scope="module")
def tensor():
    return tensor_instance()


def _tol(k):
    return mpq(1, 1 << k)


# psi and the certificate


@pytest.mark.parametrize("k", range(0, 8))
def test_psi_identity_gives_2r(tensor, k):
    one = tensor.notes["identity"]
    for r in (mpq(1, 4), mpq(3, 8), mpq(1, 2)):
        v = psi(tensor.pair.oracle, one, tensor.target, CertificateParams(r, 1), k)
        assert abs(v.to_rational() - 2 * r) < _tol(k)


@pytest.mark.parametrize("k", range(0, 8))
def test_psi_tensor_witness_is_zero(tensor, k):
    v = psi(tensor.pair.oracle, tensor.notes["witness"], tensor.target, CertificateParams(1, 1), k)
    assert v.to_rational() < _tol(k)


def test_psi_small_r_drops_gap_component(tensor):
    c = psi_components(tensor.pair.oracle, Gen(2), tensor.target, CertificateParams(mpq(1, 1 << 30), 1), 6)
    assert c["gap"] == 0
    assert abs(c["target_commutator"].to_rational() - 2) < _tol(8)


def test_unitarity_defect_examples(tensor):
    oracle = tensor.pair.oracle
    assert unitarity_defect(oracle, Gen(2), 6).to_rational() < _tol(6)
    # (sigma_x (x) 1) / 2: uu* - 1 = -3/4, norm 3/4
    half = Comb(HALF, Gen(0), GR(0), Gen(0))
    assert abs(unitarity_defect(oracle, half, 6).to_rational() - mpq(3, 4)) < _tol(6)


def test_certificate_params():
    with pytest.raises(ValueError):
        CertificateParams(0, 1)
    with pytest.raises(ValueError):
        CertificateParams(1, -1)
    assert CertificateParams("1/2", 0).r == mpq(1, 2)


def test_fprime_examples():
    ident = SpectralGapFunction(lambda n: n)
    assert fprime(ident, 5) == 8
    assert fprime(SpectralGapFunction(lambda n: 7), 3) == 7
    f = SpectralGapFunction.linear(1, 2)
    vals = [fprime(f, n) for n in range(10)]
    assert vals == sorted(vals)
    assert g(9) == 9


def test_certify_lower_bound_on_tensor(tensor):
    f = certified_gap_function(tensor.pair)
    oracle = tensor.pair.oracle
    for k in range(1, 6):
        lb = certify_lower_bound(oracle, Gen(2), tensor.target, 1, f, k)
        assert lb is not None and lb.bound == 1 - _tol(k)
        # a level above the truth is refused
        assert certify_lower_bound(oracle, Gen(2), tensor.target, mpq(9, 8), f, k) is None
        r = best_level(oracle, Gen(2), tensor.target, fprime(f, k))
        assert r >= 1


# machines


def test_lower_machine_emits_on_tensor(tensor):
    f = certified_gap_function(tensor.pair)
    k = 4
    ems = [e for e in itertools.islice(lower_bound_machine(tensor.pair.oracle, tensor.target, f, k), 40) if e]
    assert ems
    assert any(e.term == Gen(2) and e.bound >= 1 - _tol(k) for e in ems)
    assert all(e.bound <= 1 + 2 * _tol(k) for e in ems)


def test_lower_machine_sound_when_b_in_n(tensor):
    f = certified_gap_function(tensor.pair)
    for k in (2, 4):
        for e in lower_bound_machine(tensor.pair.oracle, Gen(0), f, k, budget=150):
            assert e is None or e.bound <= _tol(k)


def test_machines_empty_budget(tensor):
    f = certified_gap_function(tensor.pair)
    assert list(lower_bound_machine(tensor.pair.oracle, tensor.target, f, 3, budget=0)) == []
    assert list(upper_bound_machine(tensor.pair.oracle, tensor.target, 3, budget=0)) == []


def test_upper_machine_examples(tensor):
    k = 4
    ems = list(upper_bound_machine(tensor.pair.oracle, tensor.target, k, budget=60))
    assert ems[1].term == ZERO_TERM
    assert abs(ems[1].bound - 1) < _tol(k)
    running = [min(e.bound for e in ems[: i + 1]) for i in range(len(ems))]
    assert running == sorted(running, reverse=True)
    assert running[-1] <= 1 + _tol(k)
    assert all(e.bound >= 1 - 2 * _tol(k) for e in ems)
    # b from N: the point itself shows up and drives the bound below 2^-k
    ems = list(upper_bound_machine(tensor.pair.oracle, Gen(1), k, budget=60))
    assert min(e.bound for e in ems) < _tol(k)


# interleaver


@pytest.mark.parametrize("k", range(0, 7))
def test_interleaved_tensor(tensor, k):
    f = certified_gap_function(tensor.pair)
    res = interleaved_distance(tensor.pair.oracle, tensor.target, f, k, 5000)
    assert isinstance(res, Certified) and res.status == "Certified"
    assert abs(res.value - 1) < _tol(k)
    assert res.lower <= 1 <= res.upper
    assert res.log[-1].startswith("ACCEPT")


@pytest.mark.parametrize("k", range(0, 6))
def test_interleaved_b_in_n(tensor, k):
    f = certified_gap_function(tensor.pair)
    res = interleaved_distance(tensor.pair.oracle, Gen(0), f, k, 5000)
    assert isinstance(res, Certified)
    assert res.value < _tol(k)


def test_interleaved_budget_zero(tensor):
    f = certified_gap_function(tensor.pair)
    res = interleaved_distance(tensor.pair.oracle, tensor.target, f, 4, 0)
    assert isinstance(res, BudgetExhausted) and res.status == "BudgetExhausted"
    assert res.lower == 0
    assert res.upper == 1 + mpq(1, 64)
    assert res.queries_spent == 1


def test_interleaved_central_is_honest():
    inst = central_instance()
    f = certified_gap_function(inst.pair)
    res = interleaved_distance(inst.pair.oracle, inst.target, f, 3, 300)
    assert isinstance(res, BudgetExhausted)
    assert res.lower < 1 <= res.upper


def test_interleaved_log_format(tensor):
    f = certified_gap_function(tensor.pair)
    res = interleaved_distance(tensor.pair.oracle, tensor.target, f, 2, 5000)
    for line in res.log:
        head = line.split()[0]
        assert head in ("LB", "UB", "ACCEPT")
        if head == "LB":
            assert line.split()[1].startswith("r=") and "witness=" in line
        if head == "UB":
            assert line.split()[1].startswith("point=") and "bound=" in line
    assert f"witness={encode(Gen(2))}" in "\n".join(res.log)


def test_interleaved_deterministic_and_parallel_agrees(tensor):
    f = certified_gap_function(tensor.pair)
    for k in (1, 3, 5):
        a = interleaved_distance(tensor.pair.oracle, tensor.target, f, k, 5000)
        b = interleaved_distance(tensor.pair.oracle, tensor.target, f, k, 5000)
        c = interleaved_distance(tensor.pair.oracle, tensor.target, f, k, 5000, parallel=True)
        assert a == b == c
        assert a.log == b.log == c.log
    inst = central_instance()
    fc = certified_gap_function(inst.pair)
    a = interleaved_distance(inst.pair.oracle, inst.target, fc, 2, 200)
    c = interleaved_distance(inst.pair.oracle, inst.target, fc, 2, 200, parallel=True)
    assert a == c and a.log == c.log


def test_interleaved_with_perturbed_norms(tensor):
    base = tensor.pair.oracle
    f = certified_gap_function(tensor.pair)
    for salt in ("p", "q"):
        oracle = PairOracle(PerturbedNormOracle(tensor.pair.m_assignment, salt), base.inclusion, 2, base.n_adjoint, 4)
        for k in (1, 3):
            res = interleaved_distance(oracle, tensor.target, f, k, 5000)
            if isinstance(res, Certified):
                assert abs(res.value - 1) < _tol(k)
            else:
                assert res.lower <= 1 + _tol(k)


def test_interleaved_on_random_pairs_is_correct():
    certified = 0
    for seed in range(6):
        inst = random_pair(seed).instance
        f = certified_gap_function(inst.pair)
        dsq = inst.pair.distance_sq(inst.target)
        res = interleaved_distance(inst.pair.oracle, inst.target, f, 1, 400)
        if isinstance(res, Certified):
            certified += 1
            assert close_to_sqrt(res.value.to_rational(), dsq, _tol(1))
        else:
            # lower bounds are sound up to 2^-(k-1)
            excess = res.lower.to_rational() - 1
            assert excess <= 0 or excess * excess <= dsq
    assert certified >= 1


def test_interleaved_rejects_negative(tensor):
    f = certified_gap_function(tensor.pair)
    with pytest.raises(ValueError):
        interleaved_distance(tensor.pair.oracle, tensor.target, f, -1, 10)


# distance <-> expectation


def test_internal_precision():
    assert [internal_precision(k) for k in range(3)] == [4, 6, 8]


@pytest.mark.parametrize("k", range(0, 7))
def test_expectation_from_distance_examples(tensor, k):
    pair = tensor.pair
    dist = pair.distance_estimator()
    q = expectation_from_distance(pair.oracle, dist, Gen(0), k, 10000)
    assert (pair.m_value(Gen(0)) - pair.n_value(q)).norm2_sq() < _tol(2 * k)
    q = expectation_from_distance(pair.oracle, dist, Gen(3), k, 10000)
    assert pair.n_value(q).norm2_sq() < _tol(2 * k)
    p = Comb(HALF, Gen(0), HALF, Gen(3))
    q = expectation_from_distance(pair.oracle, dist, p, k, 10000)
    assert (pair.expectation(p) - pair.n_value(q)).norm2_sq() < _tol(2 * k)


def test_expectation_from_distance_budget(tensor):
    pair = tensor.pair
    with pytest.raises(SearchExhausted):
        expectation_from_distance(pair.oracle, pair.distance_estimator(), Comb(HALF, Gen(0), HALF, Gen(3)), 6, 3)


@pytest.mark.parametrize("k", range(0, 9))
def test_distance_from_expectation_examples(tensor, k):
    pair = tensor.pair
    expect = pair.expectation_estimator()
    assert distance_from_expectation(pair.oracle, expect, Gen(1), k) < _tol(k)
    d = distance_from_expectation(pair.oracle, expect, Gen(3), k)
    assert close_to_sqrt(d.to_rational(), 1, _tol(k))
    d = distance_from_expectation(pair.oracle, expect, Prod(Gen(1), Gen(2)), k)
    assert close_to_sqrt(d.to_rational(), 1, _tol(k))


# Pimsner-Popa


@pytest.fixture(scope="module")
def diagonal():
    inst = diagonal_instance()
    basis = [ComputablePoint.exact(t) for t in inst.notes["basis"]]
    exps = [ComputablePoint.exact(t) for t in inst.notes["basis_expectations"]]
    return inst, basis, exps


@pytest.mark.parametrize("k", [0, 2, 4, 6])
def test_pimsner_popa_examples(diagonal, k):
    inst, basis, exps = diagonal
    pair = inst.pair
    for p in (Gen(0), Gen(1), Gen(2)):
        q = pimsner_popa_expectation(pair.oracle, basis, exps, p, k, 200000)
        assert (pair.expectation(p) - pair.n_value(q)).norm2_sq() < _tol(2 * k)


def test_pimsner_popa_errors(diagonal):
    inst, basis, exps = diagonal
    with pytest.raises(ValueError):
        pimsner_popa_expectation(inst.pair.oracle, basis, exps[:1], Gen(0), 2, 100)
    with pytest.raises(SearchExhausted):
        pimsner_popa_expectation(inst.pair.oracle, basis, exps, Gen(2), 4, 2)


# spectral gap functions from Kazhdan data


def test_kazhdan_single_generator():
    adj = adjoint_close(["self", "self"])
    f = spectral_gap_fn_from_kazhdan(KazhdanData([0], m=1, p=0), adj)
    assert [f(n) for n in range(8)] == list(range(8))


def test_kazhdan_two_generators_offset():
    adj = AdjointStructure.all_self_adjoint(2)
    kd = KazhdanData([0, 4], m=5, p=3)
    # codes 0..4 are Gen0, zero, Gen0 Gen0, Gen0*, Gen1; the product costs one extra bit
    assert kazhdan_points(kd, adj) == [Gen(0), ZERO_TERM, Prod(Gen(0), Gen(0)), decode_adj0(), Gen(1)]
    f = spectral_gap_fn_from_kazhdan(kd, adj)
    assert [f(n) for n in range(6)] == [n + 4 for n in range(6)]


def decode_adj0():
    from condexp.termalg import Adj

    return Adj(Gen(0))


def test_kazhdan_monotone_and_errors():
    adj = AdjointStructure.all_self_adjoint(3)
    for m in (1, 7, 40):
        f = spectral_gap_fn_from_kazhdan(KazhdanData([0], m=m, p=1), adj)
        vals = [f(n) for n in range(12)]
        assert vals == sorted(vals)
    with pytest.raises(ValueError):
        spectral_gap_fn_from_kazhdan(KazhdanData([12], m=13, p=0), adj)
