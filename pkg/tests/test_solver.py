from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mkcert.core import INF, Instance, MKError, cost_of_plan, make_plan, validate_instance
from mkcert.fixtures import gen_remark2x2, gen_staircase
from mkcert.solver import (INFEASIBLE_FINITE, OPTIMAL, enumerate_couplings, finite_feasible,
                           is_vertex, natural_denom, solve_primal)
from strategies import instances

H = Fraction(1, 2)
T = Fraction(1, 3)


def test_remark_primal():
    res = solve_primal(gen_remark2x2())
    assert res.status == OPTIMAL and res.value == 1
    assert res.plan.support() == [(1, 1)]


def test_staircase_primal_is_diagonal():
    res = solve_primal(gen_staircase(3))
    assert res.value == 1
    assert res.plan.mass == ((T, 0, 0), (0, T, 0), (0, 0, T))


def test_all_infinite_row_is_infeasible():
    inst = validate_instance(Instance([1, 0], [H, H], [[INF, INF], [0, 0]]))
    res = solve_primal(inst)
    assert res.status == INFEASIBLE_FINITE and res.value == INF and res.plan is None
    assert not finite_feasible(inst)


def test_finite_feasible_examples():
    assert finite_feasible(gen_staircase(3))
    assert finite_feasible(validate_instance(Instance([H, H], [H, H], [[1, 2], [3, 4]])))


def test_enumerate_2x2_halves():
    inst = validate_instance(Instance([H, H], [H, H], [[1, 2], [2, 1]]))
    plans = enumerate_couplings(inst, 2)
    assert sorted(p.mass for p in plans) == sorted([((H, 0), (0, H)), ((0, H), (H, 0))])


def test_enumerate_staircase_single_finite_plan():
    finite = [p for p in enumerate_couplings(gen_staircase(3), 3) if p.is_finite()]
    assert len(finite) == 1 and finite[0].support() == [(0, 0), (1, 1), (2, 2)]


def test_enumerate_point_masses():
    inst = validate_instance(Instance([1], [1], [[5]]))
    assert [p.mass for p in enumerate_couplings(inst, 1)] == [((1,),)]


def test_enumerate_errors():
    with pytest.raises(MKError) as err:
        enumerate_couplings(gen_staircase(3), 2)
    assert err.value.code == "BAD_DENOM"
    with pytest.raises(MKError) as err:
        enumerate_couplings(gen_staircase(5), 5)
    assert err.value.code == "TOO_LARGE"


def brute_force_value(inst):
    finite = [cost_of_plan(p) for p in enumerate_couplings(inst, natural_denom(inst)) if p.is_finite()]
    return min(finite) if finite else INF


@settings(max_examples=80, deadline=None)
@given(instances(max_m=3, max_n=3, max_denom=3))
def test_primal_matches_enumeration(inst):
    res = solve_primal(inst)
    assert res.value == brute_force_value(inst)


@settings(max_examples=80, deadline=None)
@given(instances(max_m=4, max_n=4, max_denom=6))
def test_primal_plan_is_finite_vertex(inst):
    res = solve_primal(inst)
    if res.status != OPTIMAL:
        return
    pi = res.plan
    make_plan(inst, pi.mass)
    assert pi.is_finite()
    assert cost_of_plan(pi) == res.value
    assert is_vertex(pi)
    assert len(pi.support()) <= inst.m + inst.n - 1


@settings(max_examples=60, deadline=None)
@given(instances(max_m=4, max_n=4), st.data())
def test_primal_monotone_in_cost(inst, data):
    a = data.draw(st.integers(0, inst.m - 1))
    b = data.draw(st.integers(0, inst.n - 1))
    bump = data.draw(st.sampled_from([Fraction(1, 2), Fraction(3), INF]))
    cost = [list(r) for r in inst.cost]
    cost[a][b] = cost[a][b] + bump
    higher = validate_instance(Instance(inst.mu, inst.nu, cost))
    assert solve_primal(inst).value <= solve_primal(higher).value
