"""Shared contracts, configuration and diagnostics for the solvers.

Points are dense ``float64`` vectors.  Matrix-valued variables (the
spectrahedron) are stored as the row-major flattening of a symmetric
``n x n`` matrix, so ``X.ravel()`` / ``x.reshape(n, n)`` convert between the
two views.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray

Point = NDArray[np.float64]

# Every tolerance used across the package lives here.
ABS_TOL = 1e-9
LMO_VALUE_RTOL = 1e-12
ALPHA_DENOM_GUARD = 1e-16
GAMMA_RESIDUAL_RTOL = 1e-12
MAX_DOUBLINGS = 200
DEFAULT_L0 = 10.0
DEFAULT_EIG_TOL = 1e-9


class FwSlidingError(Exception):
    """Base class for errors raised by this package."""


class CorruptObjectiveError(FwSlidingError):
    """The objective returned a non-finite value or gradient."""


class LmoInconsistencyError(FwSlidingError):
    """The linear minimization oracle contradicted its own contract."""


class InnerCapExceeded(FwSlidingError):
    """The inner conditional-gradient loop used up its iteration cap.

    Carries the best iterate found so far and its gap so callers can
    inspect how far from the requested accuracy the loop stopped.
    """

    def __init__(self, message: str, best: Point, gap: float, iters: int):
        super().__init__(message)
        self.best = best
        self.gap = gap
        self.iters = iters


class BacktrackingError(FwSlidingError):
    """The Lipschitz estimate was doubled too many times."""


class EigenSolverError(FwSlidingError):
    """An iterative eigensolver failed to reach its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InvariantViolation(FwSlidingError):
    """A debug-mode certificate check failed."""


@runtime_checkable
class ObjectiveOracle(Protocol):
    """Smooth convex objective ``f`` with gradient access.

    ``lipschitz_hint`` is a known constant ``L`` with
    ``||grad f(x) - grad f(y)|| <= L ||x - y||`` or ``None``.  Only the
    fixed-L CGS baseline and the tests read it.
    """

    dim: int
    lipschitz_hint: float | None

    def value(self, x: Point) -> float: ...

    def gradient(self, x: Point) -> Point: ...


@runtime_checkable
class LinearMinimizationOracle(Protocol):
    """``minimize(g)`` returns ``(v, <g, v>)`` with ``v`` in argmin over X of ``<g, x>``."""

    ambient_dim: int
    diameter_exact: float | None
    set_id: str

    def minimize(self, g: Point) -> tuple[Point, float]: ...

    def contains(self, p: Point, tol: float = ABS_TOL) -> bool: ...


class Schedule(str, enum.Enum):
    """Stepsize schedules for the sliding loop.

    LS_CUBIC      Gamma_k = L_k gamma_k^3, beta_k = L_k gamma_k, eta_k = L_k gamma_k D^2 / k
    FIXED_N_QUAD  gamma_k = 2/(k+1), Gamma_k = 2/(k(k+1)), beta_k = 2 L_k / k, eta_k = 2 L_k D^2 / (N k)
    FIXED_N_SQ    Gamma_k = L_k gamma_k^2, beta_k = L_k gamma_k, eta_k = L_k gamma_k D^2 / N
    """

    LS_CUBIC = "LS_CUBIC"
    FIXED_N_QUAD = "FIXED_N_QUAD"
    FIXED_N_SQ = "FIXED_N_SQ"


class Termination(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    MAX_OUTER = "MAX_OUTER"
    MAX_TIME = "MAX_TIME"


def _require_positive(name: str, value: float | int) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Configuration of a CGS-ls run.

    ``max_inner_per_call`` overrides the default inner cap of
    ``10 * ceil(6 beta D^2 / eta)`` when set.
    """

    epsilon: float
    l0: float = DEFAULT_L0
    d_estimate: float = math.sqrt(2.0)
    schedule: Schedule = Schedule.LS_CUBIC
    fixed_n: int | None = None
    max_outer: int = 100_000
    max_inner_per_call: int | None = None
    max_wall_seconds: float = 1800.0
    verify_certificates: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "schedule", Schedule(self.schedule))
        for name in ("epsilon", "l0", "d_estimate", "max_outer", "max_wall_seconds"):
            _require_positive(name, getattr(self, name))
        if self.max_inner_per_call is not None:
            _require_positive("max_inner_per_call", self.max_inner_per_call)
        if self.schedule is not Schedule.LS_CUBIC:
            if self.fixed_n is None:
                raise ValueError(f"fixed_n is required by schedule {self.schedule.value}")
            _require_positive("fixed_n", self.fixed_n)


@dataclass(frozen=True)
class TraceRecord:
    """Diagnostics of one outer iteration.

    ``cum_lmo`` counts every LMO call of the run (inner and certificate
    checks); the split is reported on :class:`SolveResult`.
    """

    k: int
    l_k: float
    gamma: float
    big_gamma: float
    beta: float
    eta: float
    inner_iters: int
    f_y: float
    lower_bound: float | None
    cert_gap: float | None
    wolfe_gap: float | None
    cum_lmo: int
    cum_backtracks: int
    elapsed_seconds: float


TRACE_FIELDS = (
    "k", "l_k", "gamma", "big_gamma", "beta", "eta", "inner_iters", "f_y",
    "lower_bound", "cert_gap", "wolfe_gap", "cum_lmo", "cum_backtracks",
    "elapsed_seconds",
)


@dataclass
class SolverState:
    """Mutable per-run state of the sliding loop; never shared across runs."""

    k: int
    x: Point
    y: Point
    z: Point
    l_k: float
    gamma: float = 1.0
    big_gamma: float = 0.0
    beta: float = 0.0
    eta: float = 0.0
    lb_const: float = 0.0
    lb_grad: Point | None = None
    n_grad_evals: int = 0
    n_lmo_calls: int = 0
    n_cert_lmo_calls: int = 0
    n_backtracks: int = 0
    f_y: float = math.nan
    inner_iters: int = 0

    @classmethod
    def initial(cls, y0: Point, l0: float) -> "SolverState":
        y0 = np.array(y0, dtype=float)
        return cls(k=0, x=y0.copy(), y=y0.copy(), z=y0.copy(), l_k=float(l0),
                   lb_grad=np.zeros_like(y0))

    def lower_bound_at(self, x: Point) -> float:
        """Value of the affine under-estimator ``xi_k`` at ``x``."""
        return self.lb_const + float(self.lb_grad @ x)


@dataclass
class SolveResult:
    y_final: Point
    f_final: float
    cert_gap_final: float | None
    outer_iters: int
    total_lmo: int
    total_backtracks: int
    termination: Termination
    trace: list[TraceRecord] = field(default_factory=list)
    grad_evals: int = 0
    cert_check_lmo: int = 0
    wolfe_gap_final: float | None = None
    elapsed_seconds: float = 0.0
    # per-call inner counts and the parameters they ran with, for bound checks
    inner_calls: list[tuple[int, float, float, int]] = field(default_factory=list)
    max_inner_violation: float | None = None
    # final affine lower bound xi(x) = lb_const + <lb_grad, x> (certificate runs only)
    lb_const: float | None = None
    lb_grad: Point | None = None

    @property
    def inner_lmo(self) -> int:
        """LMO calls made inside the inner conditional-gradient loop."""
        return self.total_lmo - self.cert_check_lmo


def check_point(x: Point, dim: int) -> Point:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"expected a point of shape ({dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


def wolfe_gap(obj: ObjectiveOracle, lmo: LinearMinimizationOracle, y: Point) -> float:
    """Frank-Wolfe gap ``max_{x in X} <grad f(y), y - x>``; one LMO call."""
    g = obj.gradient(y)
    if not np.all(np.isfinite(g)):
        raise CorruptObjectiveError("gradient has non-finite entries")
    _, value = lmo.minimize(g)
    return float(g @ y) - value


def membership_check(feasible_set: LinearMinimizationOracle, p: Point, tol: float = ABS_TOL) -> bool:
    """Whether ``p`` satisfies the defining constraints of ``feasible_set`` within ``tol``.

    The Hamiltonian-cycle hull only recognises its vertices.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (feasible_set.ambient_dim,):
        raise ValueError(
            f"dimension mismatch: point has shape {p.shape}, set lives in R^{feasible_set.ambient_dim}"
        )
    return feasible_set.contains(p, tol)
