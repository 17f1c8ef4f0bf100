"""Command-line front end.

Exit codes: 0 when a verdict was computed (FAIL verdicts included), 1 on
malformed input, 2 when an internal cross-check disagrees.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import fixtures
from .core import MKError, check_potentials, cost_of_plan, fmt, make_plan, validate_instance
from .duality import check_dual_equality, solve_dual
from .formats import (parse_arcs, parse_instance, parse_potentials, vector_line,
                      verdict, write_arcs, write_instance)
from .monotonicity import (VALID, build_strong_potentials, check_cyclical,
                           check_weak_certificate, essential_arcs)
from .relaxation import (NORMALIZED, RAW, build_necessary_certificate, default_schedule,
                         search_necessary_certificate, solve_relaxed, sweep_k)
from .solver import enumerate_couplings, solve_primal


class CrossCheckFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors; exit status 2 is reserved for cross-check failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise MKError("PARSE_ERROR", f"line 0: cannot read {path}: {exc.strerror}") from None


class _Ctx:
    def __init__(self, stdin):
        self.stdin = stdin
        self._cache = {}

    def read(self, path):
        # '-' may be named by several options; stdin is consumed once
        if path not in self._cache:
            self._cache[path] = _read(path, self.stdin)
        return self._cache[path]

    def instance(self, path):
        return validate_instance(parse_instance(self.read(path)))

    def plan(self, inst, path):
        return make_plan(inst, parse_arcs(self.read(path), inst.m, inst.n))


def cmd_solve(args, ctx):
    inst = ctx.instance(args.file)
    res = solve_primal(inst)
    out = [f"status: {res.status}", f"value: {fmt(res.value)}"]
    if res.plan is not None:
        out += write_arcs(res.plan.mass)
    return out


def cmd_dual(args, ctx):
    inst = ctx.instance(args.file)
    res = solve_dual(inst)
    out = [f"status: {res.status}", f"value: {fmt(res.value)}"]
    if res.potentials is not None:
        out += [vector_line("f", res.potentials.f), vector_line("g", res.potentials.g)]
    return out


def cmd_check_equality(args, ctx):
    rep = check_dual_equality(ctx.instance(args.file))
    out = [f"primal: {fmt(rep.primal)}", f"dual: {fmt(rep.dual)}", f"verdict: {rep.verdict}"]
    if not rep.equal:
        raise CrossCheckFailure(out)
    return out


def cmd_check_cyclical(args, ctx):
    inst = ctx.instance(args.file)
    pi = ctx.plan(inst, args.plan)
    res = check_cyclical(pi, args.max_len)
    if res == VALID:
        return ["verdict: VALID"]
    return ["verdict: VIOLATION",
            "cycle: " + " ".join(f"{a},{b}" for a, b in res.arcs),
            f"defect: {fmt(res.defect)}"]


def cmd_check_strong(args, ctx):
    inst = ctx.instance(args.file)
    pi = ctx.plan(inst, args.plan)
    cert = build_strong_potentials(pi)
    if cert is None:
        return ["verdict: NONE"]
    return ["verdict: VALID",
            f"clause domination: {verdict(cert.domination_everywhere)}",
            f"clause tight: {verdict(cert.tight_on_support)}",
            vector_line("f", cert.potentials.f), vector_line("g", cert.potentials.g)]


def cmd_certify_weak(args, ctx):
    inst = ctx.instance(args.file)
    pi = ctx.plan(inst, args.plan)
    phi = check_potentials(inst, parse_potentials(ctx.read(args.f), ctx.read(args.g), inst.m, inst.n))
    cert = check_weak_certificate(pi, phi)
    out = [f"clause domination-essential: {verdict(cert.domination_on_essential)}",
           f"clause tight-support: {verdict(cert.tight_on_support)}",
           f"verdict: {'VALID' if cert.valid else 'INVALID'}",
           f"cross_check: {cert.cross_check}"]
    out += [f"essential {a} {b}" for a, b in sorted(cert.essential_arcs)]
    if cert.cross_check == "INTERNAL_BUG":
        raise CrossCheckFailure(out)
    return out


def cmd_essential(args, ctx):
    arcs = sorted(essential_arcs(ctx.instance(args.file)))
    return [f"count: {len(arcs)}"] + [f"essential {a} {b}" for a, b in arcs]


def cmd_relax(args, ctx):
    inst = ctx.instance(args.file)
    res = solve_relaxed(inst, args.k, RAW if args.raw else NORMALIZED)
    out = [f"k: {res.k}", f"weight_mode: {res.weight_mode}",
           f"value: {fmt(res.value)}", f"dual_value: {fmt(res.dual_value)}"]
    out += write_arcs(res.coupling.pos, "pos") + write_arcs(res.coupling.neg, "neg")
    out += [vector_line("f", res.dual_potentials.f), vector_line("g", res.dual_potentials.g)]
    if res.value != res.dual_value:
        raise CrossCheckFailure(out)
    return out


def cmd_sweep(args, ctx):
    res = sweep_k(ctx.instance(args.file), default_schedule(args.k_cap))
    out = [f"primal_normalized: {fmt(res.primal)}"]
    out += [f"step {k} {fmt(v)}" for k, v in res.steps]
    out += [f"k_star: {res.k_star if res.k_star is not None else 'NOT_REACHED'}",
            f"monotone: {'YES' if res.monotone else 'NO'}"]
    if not res.monotone or any(v > res.primal for _, v in res.steps):
        raise CrossCheckFailure(out)
    return out


def cmd_necessary(args, ctx):
    inst = ctx.instance(args.file)
    pi = ctx.plan(inst, args.plan)
    p = parse_arcs(ctx.read(args.p), inst.m, inst.n)
    eps = Fraction(args.epsilon)
    mode = RAW if args.raw else NORMALIZED
    cert = build_necessary_certificate(inst, pi, p, eps, mode)
    method = "DERIVED"
    if not cert.valid and args.search:
        found = search_necessary_certificate(inst, pi, p, eps, mode, args.max_defect)
        if found is None:
            method = "DERIVED (search found none)"
        else:
            cert, method = found, "SEARCHED"
    out = [f"method: {method}",
           f"epsilon: {fmt(cert.epsilon)}", f"k: {cert.k}", f"weight_mode: {cert.weight_mode}",
           vector_line("u", cert.u), vector_line("v", cert.v),
           vector_line("u_raw", cert.raw_potentials().f), vector_line("v_raw", cert.raw_potentials().g),
           f"D_count: {len(cert.D)}"]
    out += [f"defect_arc {a} {b}" for a, b in sorted(cert.D)]
    out += [f"clause {i}: {verdict(ok)}" for i, ok in cert.clauses.items()]
    out += [f"lhs {i}: {fmt(x)}" for i, x in sorted(cert.lhs.items())]
    out += [f"verdict: {'PASS' if cert.valid else 'FAIL'}"]
    return out


def cmd_fixture(args, ctx):
    inst = fixtures.generate(args.name, args.n, args.seed, Fraction(args.density))
    return write_instance(inst).rstrip("\n").split("\n")


def cmd_enumerate(args, ctx):
    inst = ctx.instance(args.file)
    plans = enumerate_couplings(inst, args.denom)
    out = [f"count: {len(plans)}"]
    for i, pi in enumerate(plans):
        out.append(f"plan {i} cost {fmt(cost_of_plan(pi))}")
        out += write_arcs(pi.mass)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mkcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, plan=False):
        p = sub.add_parser(name)
        p.add_argument("file", help="instance file, '-' for stdin")
        if plan:
            p.add_argument("--plan", required=True)
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve)
    add("dual", cmd_dual)
    add("check-equality", cmd_check_equality)
    p = add("check-cyclical", cmd_check_cyclical, plan=True)
    p.add_argument("--max-len", type=int, default=None)
    add("check-strong", cmd_check_strong, plan=True)
    p = add("certify-weak", cmd_certify_weak, plan=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    add("essential-arcs", cmd_essential)
    p = add("relax", cmd_relax)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--raw", action="store_true")
    p = add("sweep", cmd_sweep)
    p.add_argument("--k-cap", type=int, default=20, help="largest exponent E in k = 2^E")
    p = add("necessary", cmd_necessary, plan=True)
    p.add_argument("--p", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--raw", action="store_true")
    p.add_argument("--search", action="store_true",
                   help="if the derived certificate fails, search small defect sets exactly")
    p.add_argument("--max-defect", type=int, default=2)
    p = sub.add_parser("fixture")
    p.add_argument("name", choices=fixtures.NAMES)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", default="0")
    p.set_defaults(func=cmd_fixture)
    p = add("enumerate", cmd_enumerate)
    p.add_argument("--denom", type=int, required=True)
    return parser


def run(argv=None, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    args = build_parser().parse_args(argv)
    ctx = _Ctx(stdin)
    try:
        lines = args.func(args, ctx)
    except CrossCheckFailure as exc:
        stdout.write("\n".join(exc.args[0] + ["error: INTERNAL_CROSS_CHECK"]) + "\n")
        return 2
    except (MKError, ValueError) as exc:
        code = getattr(exc, "code", "INPUT_ERROR")
        if code == "INTERNAL_BUG":
            stdout.write(f"error: {exc}\n")
            return 2
        stdout.write(f"error: {exc}\n")
        return 1
    stdout.write("\n".join(lines) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
