"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from mkcert.core import INF, Instance, validate_instance


@st.composite
def marginal(draw, size, denom, positive=False):
    lo = 1 if positive else 0
    total = denom
    parts = []
    for i in range(size - 1):
        left = size - 1 - i
        hi = total - lo * left
        x = draw(st.integers(lo, hi))
        parts.append(x)
        total -= x
    parts.append(total)
    return [Fraction(x, denom) for x in parts]


@st.composite
def instances(draw, max_m=4, max_n=4, max_denom=4, allow_inf=True, positive=False):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    lo = max(m, n) if positive else 1
    denom = draw(st.integers(lo, max(lo, max_denom)))
    mu = draw(marginal(m, denom, positive))
    nu = draw(marginal(n, denom, positive))
    entry = st.integers(0, 12).map(lambda x: Fraction(x, 2))
    if allow_inf:
        entry = st.one_of(entry, entry, entry, st.just(INF))
    cost = [[draw(entry) for _ in range(n)] for _ in range(m)]
    return validate_instance(Instance(mu, nu, cost))
