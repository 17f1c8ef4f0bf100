"""Exact uncapacitated min-cost flow by primal network simplex.

Arcs are ``(tail, head, cost)`` with rational costs; arc order is the Bland
order (lowest index enters, lowest index leaves on ratio ties), which
guarantees termination on degenerate instances.  Every connected component
of the arc graph is solved over a spanning tree rooted at its
lowest-indexed node, whose potential is fixed to 0.

A starting tree is obtained from a max-flow feasible flow, cycle-cancelled
down to a forest and padded with zero-flow arcs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import MKError


class Infeasible(MKError):
    def __init__(self, message="no feasible flow"):
        super().__init__("INFEASIBLE", message)


class Unbounded(MKError):
    def __init__(self, message="negative-cost cycle without bound"):
        super().__init__("UNBOUNDED", message)


@dataclass
class FlowResult:
    flow: list          # per arc
    potential: list     # per node; None for isolated nodes
    tree: frozenset     # indices of basic arcs
    cost: Fraction
    pivots: int


def _components(num_nodes, arcs):
    parent = list(range(num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h, _ in arcs:
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[max(rt, rh)] = min(rt, rh)
    return [find(x) for x in range(num_nodes)]


def feasible_flow(num_nodes, arcs, supply):
    """Feasible flow via Edmonds-Karp on the uncapacitated arcs.

    Returns a flow list, or None when the supplies cannot be routed.
    """
    src, snk = num_nodes, num_nodes + 1
    # residual graph: edges stored as [to, cap (None = infinite), rev_index, arc_id, is_forward]
    graph = [[] for _ in range(num_nodes + 2)]

    def add(u, v, cap, arc_id):
        graph[u].append([v, cap, len(graph[v]), arc_id, True])
        graph[v].append([u, Fraction(0), len(graph[u]) - 1, arc_id, False])

    need = Fraction(0)
    for v, s in enumerate(supply):
        if s > 0:
            add(src, v, Fraction(s), None)
            need += s
        elif s < 0:
            add(v, snk, Fraction(-s), None)
    for i, (t, h, _) in enumerate(arcs):
        add(t, h, None, i)

    total = Fraction(0)
    while total < need:
        prev = [None] * (num_nodes + 2)
        prev[src] = (src, -1)
        queue = deque([src])
        while queue and prev[snk] is None:
            u = queue.popleft()
            for ei, e in enumerate(graph[u]):
                v, cap = e[0], e[1]
                if prev[v] is None and (cap is None or cap > 0):
                    prev[v] = (u, ei)
                    queue.append(v)
        if prev[snk] is None:
            return None
        bottleneck = None
        v = snk
        while v != src:
            u, ei = prev[v]
            cap = graph[u][ei][1]
            if cap is not None and (bottleneck is None or cap < bottleneck):
                bottleneck = cap
            v = u
        v = snk
        while v != src:
            u, ei = prev[v]
            e = graph[u][ei]
            if e[1] is not None:
                e[1] -= bottleneck
            back = graph[v][e[2]]
            if back[1] is not None:
                back[1] += bottleneck
            v = u
        total += bottleneck

    flow = [Fraction(0)] * len(arcs)
    for u in range(num_nodes):
        for e in graph[u]:
            if e[3] is not None and e[4]:
                # flow on an infinite-capacity arc = capacity of its reverse edge
                flow[e[3]] = graph[e[0]][e[2]][1]
    return flow


def _find_cycle(num_nodes, arcs, active):
    """Undirected cycle among ``active`` arc indices as [(arc, +1|-1), ...] or None."""
    parent = list(range(num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj = [[] for _ in range(num_nodes)]
    for i in active:
        t, h, _ = arcs[i]
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[rt] = rh
            adj[t].append((h, i, 1))
            adj[h].append((t, i, -1))
            continue
        # forest path h -> t closes the cycle t -> h -> ... -> t
        prev = {h: None}
        queue = deque([h])
        while t not in prev:
            u = queue.popleft()
            for v, j, d in adj[u]:
                if v not in prev:
                    prev[v] = (u, j, d)
                    queue.append(v)
        path = []
        v = t
        while prev[v] is not None:
            u, j, d = prev[v]
            path.append((j, d))
            v = u
        return [(i, 1)] + list(reversed(path))
    return None


def _cancel_to_forest(num_nodes, arcs, flow):
    flow = list(flow)
    while True:
        active = [i for i, x in enumerate(flow) if x > 0]
        cyc = _find_cycle(num_nodes, arcs, active)
        if cyc is None:
            return flow
        dec = [i for i, d in cyc if d < 0]
        if not dec:
            cyc = [(i, -d) for i, d in cyc]
            dec = [i for i, d in cyc if d < 0]
        theta = min(flow[i] for i in dec)
        for i, d in cyc:
            flow[i] += theta if d > 0 else -theta


class _Tree:
    """Spanning forest with parent pointers, rebuilt after each pivot."""

    def __init__(self, num_nodes, arcs, basic, roots):
        self.parent = [None] * num_nodes   # (parent_node, arc, dir) ; dir=+1 if arc points parent->node
        self.depth = [0] * num_nodes
        adj = [[] for _ in range(num_nodes)]
        for i in basic:
            t, h, _ = arcs[i]
            adj[t].append((h, i, 1))
            adj[h].append((t, i, -1))
        self.potential = [None] * num_nodes
        root_set = set(roots)
        for r in roots:
            self.potential[r] = Fraction(0)
            queue = deque([r])
            while queue:
                u = queue.popleft()
                for v, i, d in adj[u]:
                    if self.potential[v] is None and v not in root_set:
                        self.parent[v] = (u, i, d)
                        self.depth[v] = self.depth[u] + 1
                        c = arcs[i][2]
                        # reduced cost 0 on tree arcs: c - p_tail + p_head = 0
                        self.potential[v] = self.potential[u] - c if d > 0 else self.potential[u] + c
                        queue.append(v)

    def cycle(self, tail, head, entering):
        """Cycle oriented along the entering arc tail->head, as [(arc, +1|-1)]."""
        up_head, up_tail = [], []
        u, v = head, tail
        while u != v:
            if self.depth[u] >= self.depth[v]:
                p, i, d = self.parent[u]
                # walking head -> root is against the parent->node orientation
                up_head.append((i, -d))
                u = p
            else:
                p, i, d = self.parent[v]
                up_tail.append((i, d))
                v = p
        return [(entering, 1)] + up_head + list(reversed(up_tail))


def min_cost_flow(num_nodes, arcs, supply, initial=None):
    """Solve min sum cost*flow s.t. out - in = supply, flow >= 0.

    ``initial`` may provide a feasible flow; otherwise one is found by max-flow.
    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    supply = [Fraction(s) for s in supply]
    arcs = [(t, h, Fraction(c)) for t, h, c in arcs]
    comp = _components(num_nodes, arcs)
    totals = {}
    for v, s in enumerate(supply):
        totals[comp[v]] = totals.get(comp[v], Fraction(0)) + s
    if any(t != 0 for t in totals.values()):
        raise Infeasible("unbalanced component")

    flow = initial if initial is not None else feasible_flow(num_nodes, arcs, supply)
    if flow is None:
        raise Infeasible()
    flow = _cancel_to_forest(num_nodes, arcs, flow)

    touched = set()
    for t, h, _ in arcs:
        touched.add(t)
        touched.add(h)
    roots = sorted({comp[v] for v in touched})
    # pad the support forest to a spanning tree of each component
    parent = list(range(num_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    basic = set()
    for i in [i for i, x in enumerate(flow) if x > 0] + list(range(len(arcs))):
        if i in basic:
            continue
        t, h, _ = arcs[i]
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[rt] = rh
            basic.add(i)

    pivots = 0
    while True:
        tree = _Tree(num_nodes, arcs, basic, roots)
        p = tree.potential
        entering = None
        for i, (t, h, c) in enumerate(arcs):
            if i not in basic and c - p[t] + p[h] < 0:
                entering = i
                break
        if entering is None:
            break
        t, h, _ = arcs[entering]
        cyc = tree.cycle(t, h, entering)
        dec = [i for i, d in cyc if d < 0]
        if not dec:
            raise Unbounded()
        theta = min(flow[i] for i in dec)
        leaving = min(i for i in dec if flow[i] == theta)
        for i, d in cyc:
            flow[i] += theta if d > 0 else -theta
        basic.discard(leaving)
        basic.add(entering)
        pivots += 1

    cost = sum((c * x for (_, _, c), x in zip(arcs, flow)), Fraction(0))
    return FlowResult(flow=flow, potential=tree.potential, tree=frozenset(basic),
                      cost=cost, pivots=pivots)
