from fractions import Fraction

import pytest
from hypothesis import given, settings

from mkcert.core import INF, Instance, MKError, Potentials, cost_of_plan, make_plan, validate_instance
from mkcert.fixtures import gen_diag_sqrt, gen_remark2x2, gen_staircase
from mkcert.monotonicity import (VALID, Cycle, build_strong_potentials, check_cyclical,
                                 check_strong_certificate, check_weak_certificate, cycle_defect,
                                 essential_arcs, minimal_spread, spread_feasible)
from mkcert.solver import enumerate_couplings, is_vertex, natural_denom, solve_primal
from strategies import instances

H = Fraction(1, 2)


def uniform_2x2(cost):
    return validate_instance(Instance([H, H], [H, H], cost))


def anti(inst):
    return make_plan(inst, [[0, H], [H, 0]])


def test_cyclical_examples():
    bad = check_cyclical(anti(uniform_2x2([[1, 2], [2, 2]])))
    assert bad == Cycle(((0, 1), (1, 0)), Fraction(-1)) and bad.is_violation
    assert check_cyclical(anti(uniform_2x2([[1, 2], [2, 4]]))) == VALID
    const = uniform_2x2([[3, 3], [3, 3]])
    product = make_plan(const, [[Fraction(1, 4)] * 2] * 2)
    assert check_cyclical(product) == VALID


def test_cycle_defect_matches_definition():
    inst = uniform_2x2([[1, 2], [2, 2]])
    assert cycle_defect(inst, [(0, 1), (1, 0)]) == (1 + 2) - (2 + 2)


def test_cyclical_max_len_bounds_search():
    inst = uniform_2x2([[1, 2], [2, 2]])
    assert check_cyclical(anti(inst), max_len=1) == VALID


def test_strong_examples():
    inst = uniform_2x2([[1, 2], [2, 1]])
    cert = build_strong_potentials(make_plan(inst, [[H, 0], [0, H]]))
    assert cert.valid
    assert all(cert.potentials.tensor(a, a) == 1 for a in range(2))
    stair = gen_staircase(3)
    cert = build_strong_potentials(solve_primal(stair).plan)
    assert cert.potentials == Potentials([0, -1, -2], [1, 2, 3])
    assert build_strong_potentials(anti(uniform_2x2([[1, 2], [2, 2]]))) is None


def test_essential_examples():
    assert essential_arcs(gen_staircase(3)) == {(0, 0), (1, 1), (2, 2)}
    inst = validate_instance(Instance([H, H], [Fraction(1, 3), Fraction(2, 3)], [[1, 2], [3, 4]]))
    assert essential_arcs(inst) == set(inst.arcs())
    assert essential_arcs(gen_remark2x2()) == {(1, 1)}
    with pytest.raises(MKError) as err:
        essential_arcs(validate_instance(Instance([1], [1], [[INF]])))
    assert err.value.code == "NOT_FEASIBLE"


def test_weak_examples():
    inst = gen_staircase(3)
    pi = solve_primal(inst).plan
    weak = check_weak_certificate(pi, Potentials([1, 1, 1], [0, 0, 0]))
    assert weak.valid and weak.cross_check == "CONFIRMED"
    assert not check_strong_certificate(pi, Potentials([1, 1, 1], [0, 0, 0])).domination_everywhere
    bad = check_weak_certificate(pi, Potentials([2, 2, 2], [0, 0, 0]))
    assert not bad.valid and not bad.domination_on_essential
    strong = build_strong_potentials(pi)
    assert check_weak_certificate(pi, strong.potentials).valid


def test_staircase_spread_is_linear():
    for N in (2, 3, 4, 6):
        pi = solve_primal(gen_staircase(N)).plan
        assert minimal_spread(pi) == N - 1
        assert spread_feasible(pi, N - 1) and not spread_feasible(pi, N - 2)


def test_diag_sqrt_spread_cross_check():
    pi = solve_primal(gen_diag_sqrt(8)).plan
    s = minimal_spread(pi)
    assert spread_feasible(pi, s)
    assert not spread_feasible(pi, s - Fraction(1, 10 ** 7))


@settings(max_examples=60, deadline=None)
@given(instances(max_m=3, max_n=3, max_denom=4))
def test_optimal_plans_are_cyclical_and_strong(inst):
    res = solve_primal(inst)
    if res.plan is None:
        return
    assert check_cyclical(res.plan) == VALID
    cert = build_strong_potentials(res.plan)
    assert cert is not None and cert.valid
    weak = check_weak_certificate(res.plan, cert.potentials)
    assert weak.valid and weak.cross_check == "CONFIRMED"


@settings(max_examples=40, deadline=None)
@given(instances(max_m=3, max_n=3, max_denom=3))
def test_cyclical_finite_plans_are_optimal(inst):
    value = solve_primal(inst).value
    for pi in enumerate_couplings(inst, natural_denom(inst)):
        if pi.is_finite() and check_cyclical(pi) == VALID:
            assert cost_of_plan(pi) == value


@settings(max_examples=40, deadline=None)
@given(instances(max_m=3, max_n=3, max_denom=3))
def test_essential_arcs_cover_every_finite_plan(inst):
    plans = [p for p in enumerate_couplings(inst, natural_denom(inst)) if p.is_finite()]
    if not plans:
        return
    ess = essential_arcs(inst)
    assert all(set(p.support()) <= ess for p in plans)
    assert ess <= set(inst.finite_arcs())
