"""Kantorovich dual: potentials from the primal simplex multipliers, the
dual-equality check, and complementary-slackness partitions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (INF, NEG_INF, ExtRat, Instance, MKError, Plan, Potentials,
                   dual_objective, fmt)
from .lp import solve_lp
from .solver import _solve, solve_primal

OPTIMAL = "OPTIMAL"
UNBOUNDED = "UNBOUNDED"


@dataclass(frozen=True)
class DualResult:
    value: ExtRat
    potentials: Potentials | None
    status: str


def solve_dual(inst: Instance, verify: bool = False) -> DualResult:
    """Optimal potentials read off the optimal spanning tree of :func:`solve_primal`.

    Zero-mass points get -inf.  Each component's lowest-indexed A-point has f = 0.
    With ``verify`` the value is cross-checked against an independent dense LP.
    """
    net, res = _solve(inst)
    if res is None:
        out = DualResult(INF, None, UNBOUNDED)
    else:
        f = [NEG_INF] * inst.m
        g = [NEG_INF] * inst.n
        for k, a in enumerate(net.a_nodes):
            f[a] = res.potential[k]
        for k, b in enumerate(net.b_nodes):
            g[b] = -res.potential[len(net.a_nodes) + k]
        phi = Potentials(f, g)
        out = DualResult(dual_objective(inst, phi), phi, OPTIMAL)
    if verify:
        other = dual_by_dense_lp(inst)
        if other != out.value:
            raise MKError("INTERNAL_BUG", f"dual value {fmt(out.value)} != dense LP {fmt(other)}")
    return out


def dual_by_dense_lp(inst: Instance) -> ExtRat:
    """Value of max f.mu + g.nu s.t. f_a + g_b <= c_ab on finite arcs between positive-mass points."""
    pa = [a for a in range(inst.m) if inst.mu[a] > 0]
    pb = [b for b in range(inst.n) if inst.nu[b] > 0]
    nv = len(pa) + len(pb)
    obj = [inst.mu[a] for a in pa] + [inst.nu[b] for b in pb]
    A, rhs = [], []
    for i, a in enumerate(pa):
        for j, b in enumerate(pb):
            c = inst.cost[a][b]
            if c == INF:
                continue
            row = [0] * nv
            row[i] = 1
            row[len(pa) + j] = 1
            A.append(row)
            rhs.append(c)
    res = solve_lp(obj, A_ub=A, b_ub=rhs, free=range(nv), maximize=True)
    if res.status == "UNBOUNDED":
        return INF
    return res.value


@dataclass(frozen=True)
class EqualityReport:
    primal: ExtRat
    dual: ExtRat
    verdict: str

    @property
    def equal(self):
        return self.verdict == "EQUAL"


def check_dual_equality(inst: Instance) -> EqualityReport:
    p = solve_primal(inst).value
    d = solve_dual(inst).value
    return EqualityReport(p, d, "EQUAL" if p == d else "UNEQUAL")


@dataclass(frozen=True)
class SlackPartition:
    tight: frozenset
    slack: frozenset
    forbidden: frozenset = field(default_factory=frozenset)

    def support_tight(self, pi: Plan) -> bool:
        return all(arc in self.tight for arc in pi.support())


def slack_support(inst: Instance, pi: Plan, phi: Potentials) -> tuple:
    """Partition arcs into TIGHT / SLACK; returns (partition, complementary-slackness verdict)."""
    tight, slack, forbidden = set(), set(), set()
    for a in range(inst.m):
        for b in range(inst.n):
            c = inst.cost[a][b]
            s = phi.tensor(a, b)
            if pi.mass[a][b] > 0 and s > c:
                raise MKError("DOMINATION_VIOLATED",
                              f"f+g = {fmt(s)} > c = {fmt(c)} on ({a},{b})")
            if c == INF:
                forbidden.add((a, b))
            elif s == c:
                tight.add((a, b))
            else:
                slack.add((a, b))
    part = SlackPartition(frozenset(tight), frozenset(slack), frozenset(forbidden))
    return part, part.support_tight(pi)


def dominates(inst: Instance, phi: Potentials, arcs) -> bool:
    return all(phi.tensor(a, b) <= inst.cost[a][b] for a, b in arcs)


def certifies_optimality(inst: Instance, pi: Plan, phi: Potentials) -> bool:
    """Tight on the support and dominated on finite arcs between positive-mass points."""
    _, cs = slack_support(inst, pi, phi)
    return cs and dominates(inst, phi, inst.finite_arcs(positive_only=True))
