"""Dense two-phase tableau simplex over Fractions, Bland's rule.

Used as an independent route for cross-checks (dual LPs, relaxed duals);
the production solvers go through :mod:`mkcert.network`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass
class LPResult:
    status: str            # OPTIMAL | INFEASIBLE | UNBOUNDED
    value: Fraction | None
    x: list | None


def _pivot(T, basis, r, col):
    piv = T[r][col]
    row = T[r]
    if piv != 1:
        T[r] = row = [v / piv for v in row]
    for i, other in enumerate(T):
        if i != r and other[col] != 0:
            f = other[col]
            T[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = col


def _run(T, basis, allowed):
    """Minimize the objective held in the last row of T (reduced costs)."""
    obj = T[-1]
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return "OPTIMAL"
        best = None
        for i in range(len(T) - 1):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "UNBOUNDED"
        _pivot(T, basis, best[1], col)
        obj = T[-1]


def solve_lp(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=(), maximize=False):
    """Optimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x_j >= 0 unless j in ``free``."""
    n = len(c)
    free = set(free)
    # column layout: for each original var j -> plus col, and minus col if free
    cols = []
    for j in range(n):
        cols.append((j, 1))
        if j in free:
            cols.append((j, -1))
    rows = []
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), "ub"))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), "eq"))
    nslack = sum(1 for r in rows if r[2] == "ub")
    nx = len(cols)
    nart = len(rows)
    width = nx + nslack + nart + 1
    T = []
    basis = []
    s = 0
    for k, (a, b, kind) in enumerate(rows):
        line = [Fraction(0)] * width
        for ci, (j, sign) in enumerate(cols):
            line[ci] = a[j] * sign
        if kind == "ub":
            line[nx + s] = Fraction(1)
            s += 1
        line[-1] = b
        if b < 0:
            line = [-v for v in line]
        line[nx + nslack + k] = Fraction(1)
        T.append(line)
        basis.append(nx + nslack + k)
    # phase 1: minimize the sum of artificials
    obj = [Fraction(0)] * width
    for line in T:
        obj = [o - v for o, v in zip(obj, line)]
    for k in range(nart):
        obj[nx + nslack + k] = Fraction(0)
    T.append(obj)
    real = list(range(nx + nslack))
    _run(T, basis, real)
    if T[-1][-1] != 0:
        return LPResult("INFEASIBLE", None, None)
    # drive zero-level artificials out, dropping redundant rows
    i = 0
    while i < len(T) - 1:
        if basis[i] >= nx + nslack:
            col = next((j for j in real if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    sign = -1 if maximize else 1
    cost = [Fraction(0)] * width
    for ci, (j, sg) in enumerate(cols):
        cost[ci] = sign * Fraction(c[j]) * sg
    for i, bcol in enumerate(basis):
        if cost[bcol] != 0:
            f = cost[bcol]
            cost = [a - f * b for a, b in zip(cost, T[i])]
    T[-1] = cost
    status = _run(T, basis, real)
    if status == "UNBOUNDED":
        return LPResult("UNBOUNDED", None, None)
    vals = [Fraction(0)] * width
    for i, bcol in enumerate(basis):
        vals[bcol] = T[i][-1]
    x = [Fraction(0)] * n
    for ci, (j, sg) in enumerate(cols):
        x[j] += sg * vals[ci]
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult("OPTIMAL", value, x)
