"""Exact Monge-Kantorovich transport with forbidden arcs: primal and dual
solvers, optimality certificates and the k-penalised signed relaxation."""

from .core import INF, NEG_INF, Instance, MKError, Plan, Potentials, SignedCoupling, make_plan
from .duality import check_dual_equality, solve_dual
from .monotonicity import (build_strong_potentials, check_cyclical, check_weak_certificate,
                           essential_arcs, minimal_spread)
from .relaxation import build_necessary_certificate, solve_relaxed, sweep_k
from .solver import enumerate_couplings, solve_primal

__all__ = [
    "INF", "NEG_INF", "Instance", "MKError", "Plan", "Potentials", "SignedCoupling", "make_plan",
    "solve_primal", "enumerate_couplings", "solve_dual", "check_dual_equality",
    "check_cyclical", "build_strong_potentials", "check_weak_certificate", "essential_arcs",
    "minimal_spread", "solve_relaxed", "sweep_k", "build_necessary_certificate",
]
