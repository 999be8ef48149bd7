"""Projection-free convex optimization: conditional gradient sliding with
backtracking linesearch, CG and CGS baselines, and linear minimization
oracles for the simplex, the spectrahedron and the Hamiltonian-cycle
polytope."""

from .baselines import BaselineConfig, cg_run, cgs_run
from .cgsls import (
    backtracking_step,
    check_invariants,
    lower_bound_min,
    lower_bound_update,
    n_grad_bound,
    n_lin_bound,
    run,
    solve_gamma_cubic,
    solve_gamma_quadratic,
)
from .cndg import CndgResult, cndg, verify_inner_condition
from .core import (
    Schedule,
    SolveResult,
    SolverConfig,
    SolverState,
    Termination,
    TraceRecord,
    membership_check,
    wolfe_gap,
)
from .instances import InstanceSpec, QuadraticObjective, estimate_lmin, generate
from .oracles import HamiltonianLmo, SimplexLmo, SpectrahedronLmo

__all__ = [
    "BaselineConfig", "CndgResult", "HamiltonianLmo", "InstanceSpec", "QuadraticObjective",
    "Schedule", "SimplexLmo", "SolveResult", "SolverConfig", "SolverState", "SpectrahedronLmo",
    "Termination", "TraceRecord", "backtracking_step", "cg_run", "cgs_run", "check_invariants",
    "cndg", "estimate_lmin", "generate", "lower_bound_min", "lower_bound_update",
    "membership_check", "n_grad_bound", "n_lin_bound", "run", "solve_gamma_cubic",
    "solve_gamma_quadratic", "verify_inner_condition", "wolfe_gap",
]
