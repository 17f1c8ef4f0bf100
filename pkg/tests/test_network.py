"""The exact network simplex and dense LP that everything else rests on."""

from fractions import Fraction

import pytest

from mkcert.lp import solve_lp
from mkcert.network import Infeasible, feasible_flow, min_cost_flow


def test_min_cost_flow_2x2():
    # nodes 0,1 supply, 2,3 demand; arcs (tail, head, cost)
    arcs = [(0, 2, Fraction(1)), (0, 3, Fraction(2)), (1, 2, Fraction(2)), (1, 3, Fraction(1))]
    res = min_cost_flow(4, arcs, [Fraction(1, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2)])
    assert res.cost == 1
    assert res.flow == [Fraction(1, 2), 0, 0, Fraction(1, 2)]
    for (t, h, c), x in zip(arcs, res.flow):
        reduced = c - res.potential[t] + res.potential[h]
        assert reduced >= 0
        if x > 0:
            assert reduced == 0


def test_min_cost_flow_degenerate_bland_terminates():
    n = 4
    arcs = [(a, n + b, Fraction((a * 3 + b * 5) % 4)) for a in range(n) for b in range(n)]
    supply = [Fraction(1, n)] * n + [Fraction(-1, n)] * n
    assert min_cost_flow(2 * n, arcs, supply).cost == 0


def test_infeasible_flow():
    assert feasible_flow(3, [(0, 1, None)], [Fraction(1), Fraction(0), Fraction(-1)]) is None
    with pytest.raises(Infeasible):
        min_cost_flow(3, [(0, 1, Fraction(0))], [Fraction(1), Fraction(0), Fraction(-1)])


def test_dense_lp_small():
    # max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
    res = solve_lp([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], maximize=True)
    assert res.status == "OPTIMAL" and res.value == Fraction(14, 5)
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]


def test_dense_lp_unbounded_and_infeasible():
    assert solve_lp([1], A_ub=[[-1]], b_ub=[0], maximize=True).status == "UNBOUNDED"
    assert solve_lp([1], A_eq=[[1]], b_eq=[-1]).status == "INFEASIBLE"


def test_dense_lp_free_variables():
    res = solve_lp([1], A_ub=[[-1]], b_ub=[3], free=[0])
    assert res.value == -3
