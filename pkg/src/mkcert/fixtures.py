"""Instance generators: the 2x2 remark example, the staircase and the
square-root diagonal families, and seeded random instances."""

from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt

from .core import INF, Instance, MKError, validate_instance
from .solver import finite_feasible

SQRT_DENOM = 10 ** 6
NAMES = ("remark2x2", "staircase", "diag_sqrt", "random")


def gen_remark2x2() -> Instance:
    # A = {a, alpha}, B = {b, beta}; only (alpha, beta) costs anything
    return validate_instance(Instance([0, 1], [0, 1], [[0, 0], [0, 1]]))


def gen_staircase(N: int) -> Instance:
    if N < 2:
        raise ValueError("N >= 2")
    u = Fraction(1, N)
    cost = [[INF if a < b else (1 if a == b else 0) for b in range(N)] for a in range(N)]
    return validate_instance(Instance([u] * N, [u] * N, cost))


def _ceil_sqrt(x: Fraction) -> int:
    """Smallest integer s with s*s >= x."""
    n = -((-x.numerator) // x.denominator)
    s = isqrt(n)
    return s if s * s >= n else s + 1


def sqrt_cost(gap: Fraction) -> Fraction:
    """1 - sqrt(gap) rounded down to a multiple of 1/SQRT_DENOM."""
    return 1 - Fraction(_ceil_sqrt(gap * SQRT_DENOM ** 2), SQRT_DENOM)


def gen_diag_sqrt(N: int) -> Instance:
    """Grid a_i = i/N; infinite above the diagonal, 1 - sqrt(a - b) on and below it."""
    if N < 2:
        raise ValueError("N >= 2")
    u = Fraction(1, N)
    cost = [[INF if a < b else sqrt_cost(Fraction(a - b, N)) for b in range(N)] for a in range(N)]
    return validate_instance(Instance([u] * N, [u] * N, cost))


def _composition(rng, total, parts, positive):
    if positive:
        cuts = sorted(rng.sample(range(1, total), parts - 1))
        bounds = [0] + cuts + [total]
        return [bounds[i + 1] - bounds[i] for i in range(parts)]
    cuts = sorted(rng.sample(range(total + parts - 1), parts - 1))
    bounds = [-1] + cuts + [total + parts - 1]
    return [bounds[i + 1] - bounds[i] - 1 for i in range(parts)]


def gen_random(m: int, n: int, seed: int, forbid_density=0, *, max_denom: int = 6,
               denom: int | None = None, positive: bool = False,
               require_feasible: bool = True, max_retries: int = 200) -> Instance:
    """Seeded random instance.

    Both marginals share one denominator D <= max_denom (D >= m, n when
    ``positive``), drawn per attempt unless ``denom`` pins it; costs are
    multiples of 1/4 in [1, 5], each arc forbidden with probability
    ``forbid_density``.
    """
    if not (1 <= m <= 8 and 1 <= n <= 8):
        raise ValueError("1 <= m, n <= 8")
    density = Fraction(forbid_density)
    if not 0 <= density < 1:
        raise ValueError("0 <= forbid_density < 1")
    lo = max(m, n) if positive else 1
    hi = max_denom
    if denom is not None:
        if not lo <= denom <= max_denom:
            raise ValueError(f"denom must lie in [{lo}, {max_denom}]")
        lo = hi = denom
    if lo > hi:
        raise ValueError("positive marginals need max_denom >= max(m, n)")
    rng = random.Random(seed)
    for _ in range(max_retries):
        D = rng.randint(lo, hi)
        mu = [Fraction(x, D) for x in _composition(rng, D, m, positive)]
        nu = [Fraction(x, D) for x in _composition(rng, D, n, positive)]
        cost = [[INF if Fraction(rng.randrange(1000), 1000) < density else Fraction(rng.randint(4, 20), 4)
                 for _ in range(n)] for _ in range(m)]
        inst = validate_instance(Instance(mu, nu, cost))
        if not require_feasible or finite_feasible(inst):
            return inst
    raise MKError("NO_FEASIBLE_AFTER_RETRIES", f"seed {seed}")


def generate(name: str, n: int | None = None, seed: int = 0, density=0) -> Instance:
    """Dispatch on the stable fixture name used by the command line."""
    if name == "remark2x2":
        return gen_remark2x2()
    if name == "staircase":
        return gen_staircase(n or 3)
    if name == "diag_sqrt":
        return gen_diag_sqrt(n or 4)
    if name == "random":
        size = n or 3
        return gen_random(size, size, seed, density)
    raise MKError("UNKNOWN_FIXTURE", name)
