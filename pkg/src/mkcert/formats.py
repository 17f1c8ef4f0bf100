"""Line-oriented text formats.

Instance file (canonical form)::

    mk-instance v1
    A 2
    B 2
    mu
    0 1
    nu
    0 1
    cost
    0 0
    0 1

Plans, couplings and reference measures are sparse ``arc <a> <b> <mass>``
lines; other report lines are ``key: value``.  Every number is an exact
rational ``p/q`` (or integer), with ``inf`` / ``-inf`` where allowed.
"""

from __future__ import annotations

from fractions import Fraction

from .core import INF, Instance, MKError, Potentials, fmt, to_ext

HEADER = "mk-instance v1"


def _parse_error(lineno, msg):
    return MKError("PARSE_ERROR", f"line {lineno}: {msg}")


def _number(tok, lineno, allow_inf=False):
    try:
        x = to_ext(tok)
    except (ValueError, ZeroDivisionError):
        raise _parse_error(lineno, f"bad number {tok!r}") from None
    if not allow_inf and not isinstance(x, Fraction):
        raise _parse_error(lineno, f"infinite value {tok!r} not allowed here")
    if allow_inf and x != INF and not isinstance(x, Fraction):
        raise _parse_error(lineno, f"only +inf allowed, got {tok!r}")
    return x


def parse_instance(text: str) -> Instance:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    if not lines or " ".join(lines[0][1]) != HEADER:
        raise _parse_error(lines[0][0] if lines else 1, f"expected header {HEADER!r}")
    pos = 1

    def expect(keyword):
        nonlocal pos
        if pos >= len(lines):
            raise _parse_error(lines[-1][0], f"missing {keyword!r} section")
        lineno, toks = lines[pos]
        if toks[0] != keyword:
            raise _parse_error(lineno, f"expected {keyword!r}, got {toks[0]!r}")
        pos += 1
        return lineno, toks[1:]

    def size(keyword):
        lineno, rest = expect(keyword)
        if len(rest) != 1 or not rest[0].isdigit() or int(rest[0]) < 1:
            raise _parse_error(lineno, f"{keyword} needs a positive integer")
        return int(rest[0])

    def tokens(keyword, count, allow_inf=False):
        # values may follow on the keyword line or on the next lines
        nonlocal pos
        lineno, rest = expect(keyword)
        out = [(lineno, t) for t in rest]
        while len(out) < count:
            if pos >= len(lines):
                raise _parse_error(lineno, f"{keyword}: expected {count} values, got {len(out)}")
            ln, toks = lines[pos]
            out.extend((ln, t) for t in toks)
            pos += 1
        if len(out) != count:
            raise _parse_error(out[count][0], f"{keyword}: too many values")
        return [_number(t, ln, allow_inf) for ln, t in out]

    m = size("A")
    n = size("B")
    mu = tokens("mu", m)
    nu = tokens("nu", n)
    flat = tokens("cost", m * n, allow_inf=True)
    if pos != len(lines):
        raise _parse_error(lines[pos][0], "trailing content")
    return Instance(mu, nu, [flat[i * n:(i + 1) * n] for i in range(m)])


def write_instance(inst: Instance) -> str:
    out = [HEADER, f"A {inst.m}", f"B {inst.n}",
           "mu", " ".join(fmt(x) for x in inst.mu),
           "nu", " ".join(fmt(x) for x in inst.nu),
           "cost"]
    out += [" ".join(fmt(c) for c in row) for row in inst.cost]
    return "\n".join(out) + "\n"


def parse_arcs(text: str, m: int, n: int) -> list:
    """m x n matrix from ``arc a b mass`` lines; all other lines are ignored."""
    mass = [[Fraction(0)] * n for _ in range(m)]
    for i, line in enumerate(text.splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] != "arc":
            continue
        if len(toks) != 4:
            raise _parse_error(i, "expected 'arc <a> <b> <mass>'")
        try:
            a, b = int(toks[1]), int(toks[2])
        except ValueError:
            raise _parse_error(i, "arc endpoints must be integers") from None
        if not (0 <= a < m and 0 <= b < n):
            raise _parse_error(i, f"arc ({a},{b}) outside {m}x{n}")
        mass[a][b] += _number(toks[3], i)
    return mass


def write_arcs(mass, keyword: str = "arc") -> list:
    return [f"{keyword} {a} {b} {fmt(x)}"
            for a, row in enumerate(mass) for b, x in enumerate(row) if x != 0]


def parse_vector(text: str, length: int, name: str) -> list:
    """Whitespace-separated values; a leading ``name:`` label is accepted, '#' lines skipped."""
    vals = []
    for i, line in enumerate(text.splitlines(), 1):
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0].endswith(":"):
            if toks[0][:-1] != name:
                continue
            toks = toks[1:]
        for t in toks:
            try:
                vals.append((i, to_ext(t)))
            except (ValueError, ZeroDivisionError):
                raise _parse_error(i, f"bad number {t!r}") from None
    if len(vals) != length:
        raise _parse_error(vals[-1][0] if vals else 1, f"{name}: expected {length} values, got {len(vals)}")
    return [v for _, v in vals]


def parse_potentials(f_text: str, g_text: str, m: int, n: int) -> Potentials:
    return Potentials(parse_vector(f_text, m, "f"), parse_vector(g_text, n, "g"))


def vector_line(name: str, values) -> str:
    return f"{name}: " + " ".join(fmt(x) for x in values)


def verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"
