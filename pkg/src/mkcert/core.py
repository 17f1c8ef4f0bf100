"""Domain types and exact extended-rational arithmetic.

Finite values are :class:`fractions.Fraction`; the two infinities are the
singletons :data:`INF` and :data:`NEG_INF`.  Products follow the
measure-theoretic convention ``0 * inf == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class MKError(ValueError):
    """Input or contract error carrying a stable error code."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __hash__(self):
        return hash(("inf", self.sign))

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __add__(self, other):
        if isinstance(other, _Infinity):
            if other.sign != self.sign:
                raise ArithmeticError("inf - inf is undefined")
            return self
        if isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (_Infinity, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return -self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, _Infinity):
            return INF if self.sign == other.sign else NEG_INF
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return self if other > 0 else -self
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign < 0
        return NotImplemented

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign > 0
        return NotImplemented

    def __ge__(self, other):
        return self == other or self > other


INF = _Infinity(1)
NEG_INF = _Infinity(-1)

ExtRat = Union[Fraction, _Infinity]


def is_inf(x) -> bool:
    return isinstance(x, _Infinity)


def to_ext(x) -> ExtRat:
    """Coerce ints, Fractions, strings ('3/4', 'inf', '-inf') and float infinities."""
    if isinstance(x, _Infinity):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf"):
            return INF
        if s == "-inf":
            return NEG_INF
        return Fraction(s)
    if isinstance(x, float):
        if x == float("inf"):
            return INF
        if x == float("-inf"):
            return NEG_INF
        raise TypeError("finite floats are not accepted; pass a Fraction or string")
    return Fraction(x)


def fmt(x) -> str:
    """Canonical text for an extended rational: lowest terms, 'inf' / '-inf'."""
    if isinstance(x, _Infinity):
        return str(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


Arc = tuple  # (a, b)


@dataclass(frozen=True)
class Instance:
    mu: tuple
    nu: tuple
    cost: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(to_ext(x) for x in self.mu))
        object.__setattr__(self, "nu", tuple(to_ext(x) for x in self.nu))
        object.__setattr__(self, "cost", tuple(tuple(to_ext(x) for x in row) for row in self.cost))

    @property
    def m(self) -> int:
        return len(self.mu)

    @property
    def n(self) -> int:
        return len(self.nu)

    def arcs(self):
        return [(a, b) for a in range(self.m) for b in range(self.n)]

    def finite_arcs(self, positive_only: bool = False):
        """Arcs of finite cost, in lexicographic order.

        With ``positive_only`` both endpoints must carry positive marginal mass.
        """
        out = []
        for a in range(self.m):
            if positive_only and self.mu[a] == 0:
                continue
            for b in range(self.n):
                if positive_only and self.nu[b] == 0:
                    continue
                if not is_inf(self.cost[a][b]):
                    out.append((a, b))
        return out

    def shifted(self, t) -> "Instance":
        """Same instance with ``t`` added to every finite cost."""
        t = Fraction(t)
        return Instance(self.mu, self.nu,
                        [[c if is_inf(c) else c + t for c in row] for row in self.cost])


def validate_instance(inst: Instance) -> Instance:
    if inst.m == 0 or inst.n == 0:
        raise MKError("SHAPE_MISMATCH", "empty marginal")
    if len(inst.cost) != inst.m or any(len(row) != inst.n for row in inst.cost):
        raise MKError("SHAPE_MISMATCH", f"cost must be {inst.m}x{inst.n}")
    for x in inst.mu + inst.nu:
        if is_inf(x):
            raise MKError("NEGATIVE_ENTRY" if x < 0 else "MARGINAL_SUM", "infinite marginal entry")
        if x < 0:
            raise MKError("NEGATIVE_ENTRY", f"negative marginal entry {fmt(x)}")
    for row in inst.cost:
        for c in row:
            if c < 0:
                raise MKError("NEGATIVE_ENTRY", f"negative cost {fmt(c)}")
    if sum(inst.mu) != 1 or sum(inst.nu) != 1:
        raise MKError("MARGINAL_SUM",
                      f"sum(mu)={fmt(sum(inst.mu))}, sum(nu)={fmt(sum(inst.nu))}")
    return inst


@dataclass(frozen=True)
class Plan:
    instance: Instance
    mass: tuple

    def __post_init__(self):
        object.__setattr__(self, "mass", tuple(tuple(Fraction(x) for x in row) for row in self.mass))

    def support(self):
        return [(a, b) for a, row in enumerate(self.mass) for b, x in enumerate(row) if x > 0]

    def is_finite(self) -> bool:
        return all(not is_inf(self.instance.cost[a][b]) for a, b in self.support())

    def __getitem__(self, arc):
        a, b = arc
        return self.mass[a][b]


def make_plan(inst: Instance, mass) -> Plan:
    """Build a :class:`Plan`, checking shape, sign and both marginals exactly."""
    rows = [[Fraction(x) for x in row] for row in mass]
    if len(rows) != inst.m or any(len(r) != inst.n for r in rows):
        raise MKError("SHAPE_MISMATCH", f"plan must be {inst.m}x{inst.n}")
    if any(x < 0 for r in rows for x in r):
        raise MKError("INVALID_PLAN", "negative mass")
    for a in range(inst.m):
        if sum(rows[a]) != inst.mu[a]:
            raise MKError("INVALID_PLAN", f"row {a} sums to {fmt(sum(rows[a]))}, expected {fmt(inst.mu[a])}")
    for b in range(inst.n):
        col = sum(rows[a][b] for a in range(inst.m))
        if col != inst.nu[b]:
            raise MKError("INVALID_PLAN", f"column {b} sums to {fmt(col)}, expected {fmt(inst.nu[b])}")
    return Plan(inst, rows)


def plan_from_arcs(inst: Instance, arcs: dict) -> Plan:
    mass = [[Fraction(0)] * inst.n for _ in range(inst.m)]
    for (a, b), x in arcs.items():
        if not (0 <= a < inst.m and 0 <= b < inst.n):
            raise MKError("SHAPE_MISMATCH", f"arc ({a},{b}) outside {inst.m}x{inst.n}")
        mass[a][b] += Fraction(x)
    return make_plan(inst, mass)


@dataclass(frozen=True)
class Potentials:
    f: tuple
    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(to_ext(x) for x in self.f))
        object.__setattr__(self, "g", tuple(to_ext(x) for x in self.g))

    def tensor(self, a: int, b: int) -> ExtRat:
        # -inf + finite = -inf; +inf never occurs in potentials
        return self.f[a] + self.g[b]

    def shifted(self, t) -> "Potentials":
        """Gauge move f + t, g - t."""
        t = Fraction(t)
        return Potentials([x + t for x in self.f], [y - t for y in self.g])


def check_potentials(inst: Instance, phi: Potentials) -> Potentials:
    if len(phi.f) != inst.m or len(phi.g) != inst.n:
        raise MKError("SHAPE_MISMATCH", "potentials do not match instance size")
    for vals, marg in ((phi.f, inst.mu), (phi.g, inst.nu)):
        for x, w in zip(vals, marg):
            if x == INF:
                raise MKError("INVALID_POTENTIALS", "+inf potential")
            if x == NEG_INF and w > 0:
                raise MKError("INVALID_POTENTIALS", "-inf potential at a point of positive mass")
    return phi


@dataclass(frozen=True)
class SignedCoupling:
    instance: Instance
    pos: tuple
    neg: tuple

    def __post_init__(self):
        object.__setattr__(self, "pos", tuple(tuple(Fraction(x) for x in r) for r in self.pos))
        object.__setattr__(self, "neg", tuple(tuple(Fraction(x) for x in r) for r in self.neg))

    def difference(self):
        return [[p - q for p, q in zip(rp, rq)] for rp, rq in zip(self.pos, self.neg)]

    def check(self) -> "SignedCoupling":
        inst = self.instance
        for a in range(inst.m):
            for b in range(inst.n):
                p, q = self.pos[a][b], self.neg[a][b]
                if p < 0 or q < 0:
                    raise MKError("INVALID_COUPLING", "negative part")
                if p * q != 0:
                    raise MKError("INVALID_COUPLING", f"parts overlap on ({a},{b})")
                if is_inf(inst.cost[a][b]) and (p or q):
                    raise MKError("INVALID_COUPLING", f"mass on forbidden arc ({a},{b})")
        d = self.difference()
        if [sum(r) for r in d] != list(inst.mu):
            raise MKError("INVALID_COUPLING", "row marginal mismatch")
        if [sum(d[a][b] for a in range(inst.m)) for b in range(inst.n)] != list(inst.nu):
            raise MKError("INVALID_COUPLING", "column marginal mismatch")
        return self


def ext_mul(w: Fraction, x: ExtRat) -> ExtRat:
    """Product with the convention 0 * (+-inf) = 0."""
    if w == 0:
        return Fraction(0)
    return x * w


def cost_of_plan(pi: Plan) -> ExtRat:
    c = pi.instance.cost
    total = Fraction(0)
    for a, b in pi.support():
        total = total + ext_mul(pi.mass[a][b], c[a][b])
    return total


def pairing_integral(phi: Potentials, pi: Plan) -> ExtRat:
    """Integral of f(+)g against the plan; -inf if a charged arc has f(+)g = -inf."""
    c = pi.instance.cost
    total = Fraction(0)
    for a, b in pi.support():
        s = phi.tensor(a, b)
        if s > c[a][b]:
            raise MKError("DOMINATION_VIOLATED", f"f+g = {fmt(s)} > c = {fmt(c[a][b])} on ({a},{b})")
        total = total + ext_mul(pi.mass[a][b], s)
    return total


def dual_objective(inst: Instance, phi: Potentials) -> ExtRat:
    """Sum of f dmu + g dnu with 0 * (-inf) = 0."""
    total = Fraction(0)
    for x, w in zip(phi.f, inst.mu):
        total = total + ext_mul(w, x)
    for y, w in zip(phi.g, inst.nu):
        total = total + ext_mul(w, y)
    return total


def positive_points(inst: Instance):
    return ([a for a in range(inst.m) if inst.mu[a] > 0],
            [b for b in range(inst.n) if inst.nu[b] > 0])
