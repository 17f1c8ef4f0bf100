from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mkcert.core import INF, Instance, MKError, Potentials, is_inf, make_plan, validate_instance
from mkcert.fixtures import gen_random, gen_remark2x2, gen_staircase
from mkcert.monotonicity import check_weak_certificate
from mkcert.relaxation import (NORMALIZED, RAW, build_necessary_certificate, epsilon_minimizer_gap,
                               optimal_vertices, relaxed_objective, search_necessary_certificate,
                               sigma_k_dual_by_dense_lp, solve_relaxed, sweep_k, weights)
from mkcert.solver import finite_feasible, solve_primal
from strategies import instances

H = Fraction(1, 2)


def test_remark_raw_gap():
    res = solve_relaxed(gen_remark2x2(), 1, RAW)
    assert res.value == 0 == res.dual_value
    assert res.coupling.pos == ((0, 1), (1, 0))
    assert res.coupling.neg == ((1, 0), (0, 0))


def test_remark_normalized_uses_honest_plan():
    res = solve_relaxed(gen_remark2x2(), 1, NORMALIZED)
    assert res.value == 2
    assert res.coupling.pos == ((0, 0), (0, 1)) and res.coupling.neg == ((0, 0), (0, 0))


def test_uniform_2x2_normalized_matches_primal():
    inst = validate_instance(Instance([H, H], [H, H], [[1, 2], [2, 1]]))
    for k in (1, 2, 7, 64):
        assert solve_relaxed(inst, k).value == 2


def test_sweep_examples():
    r = sweep_k(gen_remark2x2())
    assert {v for _, v in r.steps} == {2} and r.k_star == 1
    r = sweep_k(gen_staircase(3), [1, 2, 4, 8])
    assert r.monotone and r.steps[-1][1] == r.primal == 2


def test_sweep_reaches_primal_beyond_first_step():
    # honest plan pays w = 11 on (1,1); the signed detour costs 1 + 1 + k
    inst = validate_instance(Instance([0, 1], [0, 1], [[0, 0], [0, 10]]))
    r = sweep_k(inst, [1, 2, 4, 8, 16, 32])
    assert r.steps == ((1, 3), (2, 4), (4, 6), (8, 10), (16, 11), (32, 11))
    assert r.monotone and r.k_star == 16


def test_necessary_staircase_half():
    inst = gen_staircase(3)
    pi = solve_primal(inst).plan
    cert = build_necessary_certificate(inst, pi, pi.mass, H)
    assert cert.valid and cert.k == 2 and cert.D == frozenset()
    raw = cert.raw_potentials()
    assert raw.f == (0, -1, -2) and raw.g == (1, 2, 3)
    assert cert.lhs[5] == 0


def test_necessary_raw_weights_cannot_certify_staircase():
    # zero costs below the diagonal leave the penalty blind; the c >= 1 normalization is needed
    inst = gen_staircase(3)
    pi = solve_primal(inst).plan
    cert = build_necessary_certificate(inst, pi, pi.mass, H, RAW)
    assert not cert.clauses[2]


def test_staircase8_needs_a_defect_set():
    # a potential chain over 8 diagonal arcs cannot fit in -w/eps <= u(+)v at eps = 1/2
    inst = gen_staircase(8)
    pi = solve_primal(inst).plan
    derived = build_necessary_certificate(inst, pi, pi.mass, H)
    assert not derived.valid and not derived.clauses[2]
    assert search_necessary_certificate(inst, pi, pi.mass, H, max_defect=0) is None
    found = search_necessary_certificate(inst, pi, pi.mass, H)
    assert found.valid and len(found.D) == 1
    assert found.lhs[2] == Fraction(3, 8) and found.lhs[5] <= H


def test_search_agrees_when_derived_passes():
    inst = gen_staircase(3)
    pi = solve_primal(inst).plan
    found = search_necessary_certificate(inst, pi, pi.mass, H)
    assert found.valid and not found.D


def test_necessary_errors():
    inst = validate_instance(Instance([H, H], [H, H], [[1, 2], [2, 1]]))
    with pytest.raises(MKError) as err:
        build_necessary_certificate(inst, make_plan(inst, [[0, H], [H, 0]]), [[H, 0], [0, H]], H)
    assert err.value.code == "NOT_OPTIMAL"
    stair = gen_staircase(3)
    pi = solve_primal(stair).plan
    with pytest.raises(MKError) as err:
        build_necessary_certificate(stair, pi, [[0, 1, 0], [0, 0, 0], [0, 0, 0]], H)
    assert err.value.code == "BAD_REFERENCE"


def test_necessary_tiny_epsilon_still_reports():
    inst = gen_random(3, 3, 11, Fraction(3, 10))
    pi = solve_primal(inst).plan
    cert = build_necessary_certificate(inst, pi, pi.mass, Fraction(1, 1000), k_cap=1024)
    assert set(cert.clauses) == {1, 2, 3, 4, 5}


def test_epsilon_gap_examples():
    inst = validate_instance(Instance([H, H], [H, H], [[1, 2], [2, 1]]))
    assert epsilon_minimizer_gap(inst, 0, 1) == 0
    assert epsilon_minimizer_gap(gen_remark2x2(), 5, 1) > 0
    assert len(optimal_vertices(inst)) == 1


def test_epsilon_gap_nonincreasing_in_k():
    for seed in range(20):
        inst = gen_random(3, 3, seed, Fraction(1, 5))
        gaps = [epsilon_minimizer_gap(inst, Fraction(1, 2), 2 ** j, trials=8, seed=seed) for j in range(4)]
        assert all(x >= y for x, y in zip(gaps, gaps[1:])), (seed, gaps)


@settings(max_examples=80, deadline=None)
@given(instances(max_m=4, max_n=4, max_denom=4), st.sampled_from([1, 2, 3, 16]),
       st.sampled_from([NORMALIZED, RAW]))
def test_relaxed_duality_and_bounds(inst, k, mode):
    if not finite_feasible(inst):
        return
    res = solve_relaxed(inst, k, mode)
    w = weights(inst, mode)
    assert res.value == relaxed_objective(res.coupling, w, k) == res.dual_value
    assert res.value == sigma_k_dual_by_dense_lp(inst, k, mode)
    shift = 1 if mode == NORMALIZED else 0
    assert res.value <= solve_primal(inst).value + shift
    phi = res.dual_potentials
    for (a, b), wt in w.items():
        if not (is_inf(phi.f[a]) or is_inf(phi.g[b])):
            assert -k * wt <= phi.tensor(a, b) <= wt


@settings(max_examples=40, deadline=None)
@given(instances(max_m=4, max_n=4, max_denom=4), st.sampled_from([Fraction(1, 10), Fraction(1, 3), 1]))
def test_necessary_certificate_agrees_with_weak(inst, eps):
    res = solve_primal(inst)
    if res.plan is None:
        return
    cert = build_necessary_certificate(inst, res.plan, res.plan.mass, eps)
    if cert.valid and not cert.D:
        raw = cert.raw_potentials()
        f = [x if inst.mu[a] > 0 else 0 for a, x in enumerate(raw.f)]
        g = [y if inst.nu[b] > 0 else 0 for b, y in enumerate(raw.g)]
        assert check_weak_certificate(res.plan, Potentials(f, g)).valid
