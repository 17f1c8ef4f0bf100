"""Penalized signed-coupling relaxation F_k, its dual over -k w <= f+g <= w,
the k-sweep, the approximate necessary certificate and the eps-minimizer gap."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil

from .core import (NEG_INF, Instance, MKError, Plan, Potentials, SignedCoupling,
                   cost_of_plan, dual_objective, fmt, is_inf, positive_points)
from .duality import solve_dual
from .lp import solve_lp
from .monotonicity import constrained_potentials
from .network import Infeasible, min_cost_flow
from .solver import finite_feasible, solve_primal

NORMALIZED = "NORMALIZED"
RAW = "RAW"
DEFAULT_CAP_EXP = 20


def weights(inst: Instance, weight_mode: str) -> dict:
    """Finite-arc weights: c + 1 (NORMALIZED) or c (RAW)."""
    if weight_mode not in (NORMALIZED, RAW):
        raise ValueError(f"unknown weight mode {weight_mode!r}")
    shift = 1 if weight_mode == NORMALIZED else 0
    return {(a, b): inst.cost[a][b] + shift for a, b in inst.finite_arcs()}


@dataclass(frozen=True)
class RelaxResult:
    k: int
    value: Fraction
    coupling: SignedCoupling
    dual_potentials: Potentials
    weight_mode: str
    dual_value: Fraction


def _signed_flow(inst, pos_cost, neg_cost, a_nodes, b_nodes):
    """Min sum pos_cost*q+ + neg_cost*q- over signed couplings on the given points.

    Returns (pos, neg, node potentials as Potentials).  Raises INFEASIBLE_RELAXED.
    """
    a_index = {a: i for i, a in enumerate(a_nodes)}
    b_index = {b: len(a_nodes) + j for j, b in enumerate(b_nodes)}
    arcs = [arc for arc in inst.finite_arcs() if arc[0] in a_index and arc[1] in b_index]
    flow_arcs = [(a_index[a], b_index[b], pos_cost[a, b]) for a, b in arcs]
    flow_arcs += [(b_index[b], a_index[a], neg_cost[a, b]) for a, b in arcs]
    supply = [inst.mu[a] for a in a_nodes] + [-inst.nu[b] for b in b_nodes]
    try:
        res = min_cost_flow(len(a_nodes) + len(b_nodes), flow_arcs, supply)
    except Infeasible as exc:
        raise MKError("INFEASIBLE_RELAXED", str(exc)) from None
    pos = [[Fraction(0)] * inst.n for _ in range(inst.m)]
    neg = [[Fraction(0)] * inst.n for _ in range(inst.m)]
    for i, (a, b) in enumerate(arcs):
        p, q = res.flow[i], res.flow[len(arcs) + i]
        # canonical Jordan form
        t = min(p, q)
        pos[a][b], neg[a][b] = p - t, q - t
    f = [NEG_INF] * inst.m
    g = [NEG_INF] * inst.n
    for a, i in a_index.items():
        if res.potential[i] is not None:
            f[a] = res.potential[i]
    for b, j in b_index.items():
        if res.potential[j] is not None:
            g[b] = -res.potential[j]
    return pos, neg, Potentials(f, g)


def relaxed_objective(coupling: SignedCoupling, w: dict, k) -> Fraction:
    total = Fraction(0)
    for (a, b), wt in w.items():
        total += wt * coupling.pos[a][b] + k * wt * coupling.neg[a][b]
    return total


def solve_relaxed(inst: Instance, k, weight_mode: str = NORMALIZED) -> RelaxResult:
    """Minimize sum w q+ + k sum w q- over signed couplings on finite arcs of all points."""
    if k <= 0:
        raise ValueError("k must be positive")
    w = weights(inst, weight_mode)
    pos, neg, phi = _signed_flow(inst, w, {arc: k * x for arc, x in w.items()},
                                 list(range(inst.m)), list(range(inst.n)))
    q = SignedCoupling(inst, pos, neg).check()
    return RelaxResult(k, relaxed_objective(q, w, k), q, phi, weight_mode, dual_objective(inst, phi))


def sigma_k_dual_by_dense_lp(inst: Instance, k, weight_mode: str = NORMALIZED) -> Fraction:
    """Independent value of max f.mu + g.nu s.t. -k w <= f+g <= w on finite arcs (all points)."""
    w = weights(inst, weight_mode)
    nv = inst.m + inst.n
    A, rhs = [], []
    for (a, b), wt in w.items():
        row = [0] * nv
        row[a] = 1
        row[inst.m + b] = 1
        A.append(row)
        rhs.append(wt)
        A.append([-x for x in row])
        rhs.append(k * wt)
    res = solve_lp(list(inst.mu) + list(inst.nu), A_ub=A, b_ub=rhs, free=range(nv), maximize=True)
    if res.status != "OPTIMAL":
        raise MKError("INFEASIBLE_RELAXED", res.status)
    return res.value


@dataclass(frozen=True)
class SweepResult:
    steps: tuple          # ((k, value), ...)
    primal: Fraction      # normalized primal value
    k_star: int | None    # None = NOT_REACHED

    @property
    def monotone(self) -> bool:
        vals = [v for _, v in self.steps]
        return all(x <= y for x, y in zip(vals, vals[1:]))


def default_schedule(cap_exp: int = DEFAULT_CAP_EXP):
    return [2 ** j for j in range(cap_exp + 1)]


def sweep_k(inst: Instance, k_schedule=None) -> SweepResult:
    if not finite_feasible(inst):
        raise MKError("NOT_FEASIBLE", "sweep needs a finite plan")
    schedule = list(k_schedule) if k_schedule is not None else default_schedule()
    primal = solve_primal(inst).value + 1
    steps = []
    k_star = None
    for k in schedule:
        v = solve_relaxed(inst, k, NORMALIZED).value
        steps.append((k, v))
        if k_star is None and v == primal:
            k_star = k
    return SweepResult(tuple(steps), primal, k_star)


@dataclass(frozen=True)
class NecessaryCertificate:
    epsilon: Fraction
    k: int
    weight_mode: str
    reference: tuple        # p, m x n
    phi: dict               # arc -> value on the support of pi + p
    u: tuple
    v: tuple
    D: frozenset
    clauses: dict           # 1..5 -> bool
    lhs: dict               # numeric left-hand sides for clauses 2 and 5

    @property
    def valid(self) -> bool:
        return all(self.clauses.values())

    def raw_potentials(self) -> Potentials:
        """(u, v) on the scale of the unshifted cost: v - 1 under NORMALIZED weights."""
        shift = 1 if self.weight_mode == NORMALIZED else 0
        return Potentials(self.u, [y - shift for y in self.v])


def _check_reference(inst: Instance, p) -> list:
    p = [[Fraction(x) for x in row] for row in p]
    if len(p) != inst.m or any(len(r) != inst.n for r in p):
        raise MKError("SHAPE_MISMATCH", "reference measure shape")
    if any(x < 0 for r in p for x in r) or sum(sum(r) for r in p) != 1:
        raise MKError("BAD_REFERENCE", "p must be a probability on arcs")
    for a in range(inst.m):
        for b in range(inst.n):
            if p[a][b] > 0 and is_inf(inst.cost[a][b]):
                raise MKError("BAD_REFERENCE", f"p charges forbidden arc ({a},{b})")
    return p


def _certificate_at(inst, pi, p, eps, k, weight_mode):
    w = weights(inst, weight_mode)
    pa, pb = positive_points(inst)
    a_nodes = sorted(set(pa) | {a for a in range(inst.m) for b in range(inst.n) if p[a][b] > 0})
    b_nodes = sorted(set(pb) | {b for a in range(inst.m) for b in range(inst.n) if p[a][b] > 0})
    pos, neg, _ = _signed_flow(inst, w, {arc: k * x for arc, x in w.items()}, a_nodes, b_nodes)
    # canonical optimal dual: tight where the optimal coupling is charged
    box = [arc for arc in w if arc[0] in a_nodes and arc[1] in b_nodes]
    tight = {}
    for a, b in box:
        if pos[a][b] > 0:
            tight[a, b] = w[a, b]
        elif neg[a][b] > 0:
            tight[a, b] = -k * w[a, b]
    phi_uv = constrained_potentials(inst, tight, {arc: w[arc] for arc in box},
                                    {arc: -k * w[arc] for arc in box}, a_nodes, b_nodes)
    if phi_uv is None:
        raise MKError("INTERNAL_BUG", "relaxed dual has no potentials on its optimal support")
    u, v = phi_uv.f, phi_uv.g
    charged = [(a, b) for a in range(inst.m) for b in range(inst.n)
               if pi.mass[a][b] + p[a][b] > 0]
    phi = {arc: u[arc[0]] + v[arc[1]] for arc in charged}
    D = frozenset(arc for arc in pi.support() if phi[arc] != w[arc])
    return _evaluate(inst, pi, p, eps, k, weight_mode, u, v, phi, D)


def _evaluate(inst, pi, p, eps, k, weight_mode, u, v, phi, D):
    """Check the five clauses exactly for given (u, v, phi, D)."""
    w = weights(inst, weight_mode)
    charged = sorted(phi)
    lhs2 = sum(((1 + w[arc]) * pi.mass[arc[0]][arc[1]] for arc in D), Fraction(0))
    lhs5 = sum((abs(phi[arc] - (u[arc[0]] + v[arc[1]])) * (pi.mass[arc[0]][arc[1]] + p[arc[0]][arc[1]])
                for arc in charged), Fraction(0))
    clauses = {
        1: all(phi[arc] == w[arc] for arc in pi.support() if arc not in D),
        2: lhs2 <= eps,
        3: all(-w[arc] / eps <= phi[arc] <= w[arc] for arc in charged),
        4: all(-w[(a, b)] / eps <= u[a] + v[b] <= w[(a, b)]
               for a, b in inst.finite_arcs(positive_only=True)),
        5: lhs5 <= eps,
    }
    return NecessaryCertificate(eps, k, weight_mode, tuple(tuple(r) for r in p), phi,
                                tuple(u), tuple(v), frozenset(D), clauses, {2: lhs2, 5: lhs5})


def build_necessary_certificate(inst: Instance, pi: Plan, p, epsilon,
                                weight_mode: str = NORMALIZED,
                                k_cap: int = 2 ** DEFAULT_CAP_EXP) -> NecessaryCertificate:
    """Approximate necessary certificate from the penalized dual at k = ceil(1/eps).

    If some clause fails, k is doubled up to ``k_cap``; the first all-pass
    attempt is returned, otherwise the attempt with fewest failing clauses.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    primal = solve_primal(inst)
    if primal.plan is None or not pi.is_finite() or cost_of_plan(pi) != primal.value:
        raise MKError("NOT_OPTIMAL", "plan is not optimal")
    p = _check_reference(inst, p)
    k = ceil(1 / eps)
    best = None
    while True:
        cert = _certificate_at(inst, pi, p, eps, k, weight_mode)
        if cert.valid:
            return cert
        fails = sum(not ok for ok in cert.clauses.values())
        if best is None or fails < best[0]:
            best = (fails, cert)
        if k >= k_cap:
            return best[1]
        k = min(2 * k, k_cap)


def search_necessary_certificate(inst: Instance, pi: Plan, p, epsilon,
                                 weight_mode: str = NORMALIZED, max_defect: int = 2):
    """Exact search for a certificate when the derived construction fails.

    Tries defect sets D of at most ``max_defect`` support arcs with
    sum_D (1 + w) pi <= eps, smallest first.  For each D one dense LP
    minimizes sum |w - u(+)v| (pi + p) over support arcs outside D, with
    phi = w there and phi = u(+)v elsewhere, subject to -w/eps <= u(+)v <= w.
    Returns the first all-pass certificate, or None.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    primal = solve_primal(inst)
    if primal.plan is None or not pi.is_finite() or cost_of_plan(pi) != primal.value:
        raise MKError("NOT_OPTIMAL", "plan is not optimal")
    p = _check_reference(inst, p)
    w = weights(inst, weight_mode)
    pa, pb = positive_points(inst)
    a_nodes = sorted(set(pa) | {a for a in range(inst.m) for b in range(inst.n) if p[a][b] > 0})
    b_nodes = sorted(set(pb) | {b for a in range(inst.m) for b in range(inst.n) if p[a][b] > 0})
    col = {("A", a): i for i, a in enumerate(a_nodes)}
    col.update({("B", b): len(a_nodes) + j for j, b in enumerate(b_nodes)})
    nfree = len(col)
    charged = [(a, b) for a in range(inst.m) for b in range(inst.n) if pi.mass[a][b] + p[a][b] > 0]
    bounded = sorted(set(inst.finite_arcs(positive_only=True)) | set(charged))
    support = pi.support()

    def row(a, b, size, sign=1):
        r = [0] * size
        r[col["A", a]] = sign
        r[col["B", b]] = sign
        return r

    candidates = []
    for r in range(max_defect + 1):
        for D in combinations(support, r):
            lhs2 = sum(((1 + w[arc]) * pi.mass[arc[0]][arc[1]] for arc in D), Fraction(0))
            if lhs2 <= eps:
                candidates.append((r, lhs2, D))
    candidates.sort()
    for _, _, D in candidates:
        free_arcs = [arc for arc in support if arc not in D]
        size = nfree + len(free_arcs)
        A, rhs = [], []
        for a, b in bounded:
            A.append(row(a, b, size))
            rhs.append(w[a, b])
            A.append(row(a, b, size, -1))
            rhs.append(w[a, b] / eps)
        for t, (a, b) in enumerate(free_arcs):
            r = row(a, b, size)
            r[nfree + t] = -1
            A.append(r)
            rhs.append(w[a, b])
            r = row(a, b, size, -1)
            r[nfree + t] = -1
            A.append(r)
            rhs.append(-w[a, b])
        obj = [0] * nfree + [pi.mass[a][b] + p[a][b] for a, b in free_arcs]
        res = solve_lp(obj, A_ub=A, b_ub=rhs, free=range(nfree))
        if res.status != "OPTIMAL" or res.value > eps:
            continue
        u = [NEG_INF] * inst.m
        v = [NEG_INF] * inst.n
        for a in a_nodes:
            u[a] = res.x[col["A", a]]
        for b in b_nodes:
            v[b] = res.x[col["B", b]]
        phi = {arc: (w[arc] if arc in free_arcs else u[arc[0]] + v[arc[1]]) for arc in charged}
        cert = _evaluate(inst, pi, p, eps, ceil(1 / eps), weight_mode, u, v, phi, D)
        if cert.valid:
            return cert
    return None


def _forest_flow(inst, arcs, pa, pb):
    """Unique plan supported on a forest of arcs, or None if it is not a plan."""
    resid = {("A", a): inst.mu[a] for a in pa}
    resid.update({("B", b): inst.nu[b] for b in pb})
    adj = {v: set() for v in resid}
    for a, b in arcs:
        adj["A", a].add((a, b))
        adj["B", b].add((a, b))
    flow = {}
    leaves = [v for v in adj if len(adj[v]) == 1]
    while leaves:
        v = leaves.pop()
        if len(adj[v]) != 1:
            continue
        arc = adj[v].pop()
        x = resid[v]
        if x < 0:
            return None
        flow[arc] = x
        other = ("B", arc[1]) if v[0] == "A" else ("A", arc[0])
        resid[v] = Fraction(0)
        resid[other] -= x
        adj[other].discard(arc)
        if len(adj[other]) == 1:
            leaves.append(other)
    if any(x != 0 for x in resid.values()) or any(x < 0 for x in flow.values()):
        return None
    mass = [[Fraction(0)] * inst.n for _ in range(inst.m)]
    for (a, b), x in flow.items():
        mass[a][b] = x
    return Plan(inst, mass)


def optimal_vertices(inst: Instance, max_tight: int = 20) -> list:
    """All vertex optimal plans: forests inside the tight set of an optimal dual."""
    dual = solve_dual(inst)
    if dual.potentials is None:
        raise MKError("NOT_FEASIBLE", "no finite plan exists")
    phi = dual.potentials
    tight = [(a, b) for a, b in inst.finite_arcs(positive_only=True)
             if phi.tensor(a, b) == inst.cost[a][b]]
    if len(tight) > max_tight:
        raise MKError("TOO_LARGE", f"{len(tight)} tight arcs")
    pa, pb = positive_points(inst)
    seen = set()
    out = []
    for r in range(1, len(pa) + len(pb)):
        for subset in combinations(tight, r):
            plan = _forest_flow(inst, subset, pa, pb)
            if plan is not None and plan.mass not in seen:
                seen.add(plan.mass)
                out.append(plan)
    return out


def weighted_distance(inst: Instance, q: SignedCoupling, plan: Plan) -> Fraction:
    """sum (1 + c) |q - plan| over finite arcs."""
    total = Fraction(0)
    for a, b in inst.finite_arcs():
        diff = q.pos[a][b] - q.neg[a][b] - plan.mass[a][b]
        total += (1 + inst.cost[a][b]) * abs(diff)
    return total


def epsilon_minimizer_gap(inst: Instance, epsilon, k, trials: int = 32, seed: int = 0) -> Fraction:
    """Largest weighted distance from sampled eps-minimizers of F_k to the optimal vertices.

    Members are vertices obtained by re-solving with seeded multiplicative
    perturbations of both parts of the objective, kept when their true F_k
    value is within ``epsilon`` of min F_k.
    """
    if not finite_feasible(inst):
        raise MKError("NOT_FEASIBLE", "gap needs a finite plan")
    eps = Fraction(epsilon)
    w = weights(inst, NORMALIZED)
    base = solve_relaxed(inst, k, NORMALIZED)
    targets = optimal_vertices(inst)
    rng = random.Random(seed)
    members = [base.coupling]
    for _ in range(trials):
        pc = {arc: x * (1 + Fraction(rng.randint(-50, 100), 100)) for arc, x in w.items()}
        nc = {arc: k * x * (1 + Fraction(rng.randint(-50, 100), 100)) for arc, x in w.items()}
        pos, neg, _ = _signed_flow(inst, pc, nc, list(range(inst.m)), list(range(inst.n)))
        q = SignedCoupling(inst, pos, neg)
        if relaxed_objective(q, w, k) <= base.value + eps:
            members.append(q)
    return max(min(weighted_distance(inst, q, t) for t in targets) for q in members)
