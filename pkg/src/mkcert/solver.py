"""Exact primal solving of the transport problem and a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .core import INF, ExtRat, Instance, MKError, Plan, cost_of_plan, positive_points
from .network import Infeasible, feasible_flow, min_cost_flow

OPTIMAL = "OPTIMAL"
INFEASIBLE_FINITE = "INFEASIBLE_FINITE"


@dataclass(frozen=True)
class PrimalResult:
    value: ExtRat
    plan: Plan | None
    status: str


@dataclass(frozen=True)
class TransportNetwork:
    """Positive-mass points as nodes (A first), finite-cost arcs between them."""

    a_nodes: tuple
    b_nodes: tuple
    arcs: tuple        # (a, b) pairs in lexicographic order

    @property
    def num_nodes(self):
        return len(self.a_nodes) + len(self.b_nodes)

    def node_of_a(self, a):
        return self.a_nodes.index(a)

    def node_of_b(self, b):
        return len(self.a_nodes) + self.b_nodes.index(b)

    def supply(self, inst: Instance):
        return [inst.mu[a] for a in self.a_nodes] + [-inst.nu[b] for b in self.b_nodes]

    def flow_arcs(self, costs):
        """``costs`` maps (a, b) -> rational weight."""
        return [(self.node_of_a(a), self.node_of_b(b), costs[a, b]) for a, b in self.arcs]


def transport_network(inst: Instance) -> TransportNetwork:
    pa, pb = positive_points(inst)
    return TransportNetwork(tuple(pa), tuple(pb), tuple(inst.finite_arcs(positive_only=True)))


@lru_cache(maxsize=4096)
def _solve(inst: Instance):
    net = transport_network(inst)
    costs = {arc: inst.cost[arc[0]][arc[1]] for arc in net.arcs}
    try:
        res = min_cost_flow(net.num_nodes, net.flow_arcs(costs), net.supply(inst))
    except Infeasible:
        return net, None
    return net, res


def solve_primal(inst: Instance) -> PrimalResult:
    net, res = _solve(inst)
    if res is None:
        return PrimalResult(INF, None, INFEASIBLE_FINITE)
    mass = [[Fraction(0)] * inst.n for _ in range(inst.m)]
    for (a, b), x in zip(net.arcs, res.flow):
        mass[a][b] = x
    plan = Plan(inst, mass)
    return PrimalResult(cost_of_plan(plan), plan, OPTIMAL)


def finite_feasible(inst: Instance) -> bool:
    net = transport_network(inst)
    arcs = [(net.node_of_a(a), net.node_of_b(b), 0) for a, b in net.arcs]
    return feasible_flow(net.num_nodes, arcs, net.supply(inst)) is not None


def _compositions(total, caps):
    """All vectors x with 0 <= x[i] <= caps[i] and sum(x) == total, lexicographic."""
    if not caps:
        if total == 0:
            yield ()
        return
    rest = sum(caps[1:])
    for x in range(max(0, total - rest), min(total, caps[0]) + 1):
        for tail in _compositions(total - x, caps[1:]):
            yield (x,) + tail


def enumerate_couplings(inst: Instance, denom: int) -> list:
    """Every plan whose entries are multiples of 1/denom, including ones using forbidden arcs."""
    if denom < 1:
        raise MKError("BAD_DENOM", "denominator must be positive")
    if inst.m * inst.n > 16 or denom > 6:
        raise MKError("TOO_LARGE", f"m*n={inst.m * inst.n}, denom={denom}")
    rows = [x * denom for x in inst.mu]
    cols = [x * denom for x in inst.nu]
    if any(v.denominator != 1 for v in rows + cols):
        raise MKError("BAD_DENOM", f"marginals not multiples of 1/{denom}")
    rows = [int(v) for v in rows]
    cols = [int(v) for v in cols]
    out = []

    def rec(i, remaining, acc):
        if i == inst.m - 1:
            if sum(remaining) == rows[i]:
                table = acc + [list(remaining)]
                out.append(Plan(inst, [[Fraction(v, denom) for v in r] for r in table]))
            return
        for row in _compositions(rows[i], remaining):
            rec(i + 1, [c - x for c, x in zip(remaining, row)], acc + [list(row)])

    rec(0, cols, [])
    return out


def natural_denom(inst: Instance) -> int:
    return lcm(*(x.denominator for x in inst.mu + inst.nu))


def is_vertex(pi: Plan) -> bool:
    """Vertex of the transportation polytope iff the support graph is a forest."""
    m = pi.instance.m
    parent = list(range(m + pi.instance.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pi.support():
        ra, rb = find(a), find(m + b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True
