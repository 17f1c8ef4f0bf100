"""Cyclical monotonicity, strong and weak optimality certificates, and the
arcs charged by some finite plan."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import (NEG_INF, ExtRat, Instance, MKError, Plan, Potentials,
                   cost_of_plan, is_inf, positive_points)
from .network import min_cost_flow
from .solver import finite_feasible, solve_primal, transport_network

VALID = "VALID"


@dataclass(frozen=True)
class Cycle:
    arcs: tuple
    defect: ExtRat

    @property
    def is_violation(self) -> bool:
        return self.defect < 0


def cycle_defect(inst: Instance, arcs) -> ExtRat:
    shifted = sum((inst.cost[arcs[i][0]][arcs[(i + 1) % len(arcs)][1]] for i in range(len(arcs))),
                  Fraction(0))
    own = sum((inst.cost[a][b] for a, b in arcs), Fraction(0))
    if is_inf(own):
        raise MKError("INVALID_PLAN", "cycle through a forbidden support arc")
    return shifted - own


def check_cyclical(pi: Plan, max_len: int | None = None):
    """Depth-first search for a support cycle with negative defect.

    Cycles visit distinct A-points and start at their smallest arc, so the first
    violation found in preorder is the lexicographically smallest one.
    Returns ``VALID`` or the violating :class:`Cycle`.
    """
    inst = pi.instance
    c = inst.cost
    support = pi.support()
    if max_len is None:
        max_len = len(support)
    if max_len < 2 or len(support) < 2:
        return VALID
    bs = sorted({b for _, b in support})
    # cheapest possible exchange step out of each support arc
    step_min = {}
    for a, b in support:
        step_min[a, b] = min(c[a][b2] - c[a][b] for b2 in bs)
    floor = min(min(step_min.values()), Fraction(0))

    def dfs(path, used, partial):
        a_last, b_last = path[-1]
        depth = len(path)
        if depth >= 2:
            closing = partial + (c[a_last][path[0][1]] - c[a_last][b_last])
            if closing < 0:
                return Cycle(tuple(path), closing)
        if depth == max_len:
            return None
        # no completion can turn negative
        if partial + step_min[a_last, b_last] + (max_len - depth) * floor >= 0:
            return None
        for a, b in support:
            if a <= path[0][0] or a in used:
                continue
            nxt = partial + (c[a_last][b] - c[a_last][b_last])
            if is_inf(nxt):
                continue
            found = dfs(path + [(a, b)], used | {a}, nxt)
            if found is not None:
                return found
        return None

    for start in support:
        found = dfs([start], {start[0]}, Fraction(0))
        if found is not None:
            return found
    return VALID


@dataclass(frozen=True)
class StrongCertificate:
    potentials: Potentials
    domination_everywhere: bool
    tight_on_support: bool

    @property
    def valid(self) -> bool:
        return self.domination_everywhere and self.tight_on_support


def check_strong_certificate(pi: Plan, phi: Potentials) -> StrongCertificate:
    """Domination on every finite arc between positive-mass points, tightness on the support."""
    inst = pi.instance
    dom = all(phi.tensor(a, b) <= inst.cost[a][b] for a, b in inst.finite_arcs(positive_only=True))
    tight = all(phi.tensor(a, b) == inst.cost[a][b] for a, b in pi.support())
    return StrongCertificate(phi, dom, tight)


def constrained_potentials(inst: Instance, tight, upper, lower=None, a_nodes=None, b_nodes=None):
    """Potentials with f+g fixed on ``tight`` arcs and bounded on the ``upper`` arcs.

    ``tight`` maps arc -> required value of f+g; ``upper`` (and optionally
    ``lower``) map arc -> bound.  Values are propagated along the tight-arc
    graph from the lowest-indexed A-point of each component; the remaining
    per-component offsets solve a difference-constraint system by
    Bellman-Ford.  Returns None when no such potentials exist.
    """
    if a_nodes is None or b_nodes is None:
        a_nodes, b_nodes = positive_points(inst)
    nodes = [("A", a) for a in a_nodes] + [("B", b) for b in b_nodes]
    adj = {v: [] for v in nodes}
    for (a, b), val in tight.items():
        adj["A", a].append((("B", b), val))
        adj["B", b].append((("A", a), val))

    base = {}
    comp = {}
    roots = []
    for v in nodes:
        if v in base:
            continue
        roots.append(v)
        base[v] = Fraction(0)
        comp[v] = len(roots) - 1
        stack = [v]
        while stack:
            u = stack.pop()
            for w, val in adj[u]:
                if w not in base:
                    base[w] = val - base[u]
                    comp[w] = comp[u]
                    stack.append(w)
    for (a, b), val in tight.items():
        if base["A", a] + base["B", b] != val:
            return None

    # offsets: f = base + t, g = base - t ; constraint t_i - t_j <= w  <=>  edge j -> i
    edges = []
    for (a, b), bound in upper.items():
        i, j = comp["A", a], comp["B", b]
        edges.append((j, i, bound - base["A", a] - base["B", b]))
    for (a, b), bound in (lower or {}).items():
        i, j = comp["A", a], comp["B", b]
        edges.append((i, j, base["A", a] + base["B", b] - bound))
    k = len(roots)
    dist = [Fraction(0)] * k
    for _ in range(k + 1):
        changed = False
        for j, i, w in edges:
            if dist[j] + w < dist[i]:
                dist[i] = dist[j] + w
                changed = True
        if not changed:
            break
    else:
        return None
    shift = dist[0] if k else Fraction(0)
    f = [NEG_INF] * inst.m
    g = [NEG_INF] * inst.n
    for v in nodes:
        t = dist[comp[v]] - shift
        if v[0] == "A":
            f[v[1]] = base[v] + t
        else:
            g[v[1]] = base[v] - t
    return Potentials(f, g)


def build_strong_potentials(pi: Plan) -> StrongCertificate | None:
    inst = pi.instance
    tight = {(a, b): inst.cost[a][b] for a, b in pi.support()}
    if any(is_inf(v) for v in tight.values()):
        return None
    upper = {arc: inst.cost[arc[0]][arc[1]] for arc in inst.finite_arcs(positive_only=True)}
    phi = constrained_potentials(inst, tight, upper)
    if phi is None:
        return None
    cert = check_strong_certificate(pi, phi)
    assert cert.valid
    return cert


def minimal_spread(pi: Plan) -> Fraction | None:
    """Smallest max(f) - min(f) over strong certificates of ``pi`` (None if there is none).

    With node variables p_a = f_a and p_b = -g_b every certificate constraint is
    a difference constraint; the smallest achievable spread is the largest
    forced gap max_{a,a'} -d(a, a') in the shortest-path closure.
    """
    inst = pi.instance
    pa, pb = positive_points(inst)
    idx = {("A", a): i for i, a in enumerate(pa)}
    idx.update({("B", b): len(pa) + j for j, b in enumerate(pb)})
    size = len(idx)
    d = [[None] * size for _ in range(size)]
    for i in range(size):
        d[i][i] = Fraction(0)

    def relax(u, v, w):
        if d[u][v] is None or w < d[u][v]:
            d[u][v] = w

    for a, b in inst.finite_arcs(positive_only=True):
        relax(idx["B", b], idx["A", a], inst.cost[a][b])     # p_a - p_b <= c
    for a, b in pi.support():
        c = inst.cost[a][b]
        if is_inf(c):
            return None
        relax(idx["A", a], idx["B", b], -c)                  # p_b - p_a <= -c
    for k in range(size):
        dk = d[k]
        for i in range(size):
            dik = d[i][k]
            if dik is None:
                continue
            di = d[i]
            for j in range(size):
                dkj = dk[j]
                if dkj is not None:
                    s = dik + dkj
                    if di[j] is None or s < di[j]:
                        di[j] = s
    if any(d[i][i] < 0 for i in range(size)):
        return None
    spread = Fraction(0)
    for i in range(len(pa)):
        for j in range(len(pa)):
            if i != j and d[i][j] is not None:
                spread = max(spread, -d[i][j])
    return spread


def spread_feasible(pi: Plan, spread) -> bool:
    """Whether a strong certificate with max(f) - min(f) <= spread exists (Bellman-Ford)."""
    inst = pi.instance
    pa, pb = positive_points(inst)
    nodes = [("A", a) for a in pa] + [("B", b) for b in pb]
    edges = []
    for a, b in inst.finite_arcs(positive_only=True):
        edges.append((("B", b), ("A", a), inst.cost[a][b]))
    for a, b in pi.support():
        edges.append((("A", a), ("B", b), -inst.cost[a][b]))
    for a in pa:
        for a2 in pa:
            if a != a2:
                edges.append((("A", a2), ("A", a), Fraction(spread)))
    dist = {v: Fraction(0) for v in nodes}
    for _ in range(len(nodes) + 1):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            return True
    return False


@lru_cache(maxsize=1024)
def _essential(inst: Instance) -> frozenset:
    net = transport_network(inst)
    supply = net.supply(inst)
    found = set()
    for target in net.arcs:
        if target in found:
            continue
        costs = {arc: (Fraction(-1) if arc == target else Fraction(0)) for arc in net.arcs}
        res = min_cost_flow(net.num_nodes, net.flow_arcs(costs), supply)
        for arc, x in zip(net.arcs, res.flow):
            if x > 0:
                found.add(arc)
    return frozenset(found)


def essential_arcs(inst: Instance) -> frozenset:
    """Arcs charged by at least one finite plan (one max-mass LP per arc)."""
    if not finite_feasible(inst):
        raise MKError("NOT_FEASIBLE", "no finite plan exists")
    return _essential(inst)


@dataclass(frozen=True)
class WeakCertificate:
    potentials: Potentials
    essential_arcs: frozenset
    domination_on_essential: bool
    tight_on_support: bool
    cross_check: str    # CONFIRMED | INTERNAL_BUG | NOT_APPLICABLE

    @property
    def valid(self) -> bool:
        return self.domination_on_essential and self.tight_on_support


def check_weak_certificate(pi: Plan, phi: Potentials) -> WeakCertificate:
    inst = pi.instance
    if not pi.is_finite():
        raise MKError("INVALID_PLAN", "plan charges a forbidden arc")
    ess = essential_arcs(inst)
    dom = all(phi.tensor(a, b) <= inst.cost[a][b] for a, b in ess)
    tight = all(phi.tensor(a, b) == inst.cost[a][b] for a, b in pi.support())
    status = "NOT_APPLICABLE"
    if dom and tight:
        status = "CONFIRMED" if cost_of_plan(pi) == solve_primal(inst).value else "INTERNAL_BUG"
    return WeakCertificate(phi, ess, dom, tight, status)
