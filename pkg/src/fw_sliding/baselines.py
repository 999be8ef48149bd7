"""Reference solvers: the classical conditional gradient method and
conditional gradient sliding with a fixed Lipschitz constant.  Both stop on
the Wolfe gap."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .cgsls import _eval, _sliding_loop
from .core import Point, Schedule, SolveResult, SolverConfig, Termination, TraceRecord, check_point


@dataclass(frozen=True)
class BaselineConfig:
    """``lipschitz`` and ``fixed_n`` are used by CGS only.

    ``fixed_n`` defaults to ``ceil(sqrt(12 L D^2 / epsilon))``, the outer
    iteration count after which fixed-L CGS is guaranteed to be
    ``epsilon``-accurate.  ``d_estimate`` defaults to the exact diameter of
    the feasible set.
    """

    epsilon: float
    lipschitz: float | None = None
    fixed_n: int | None = None
    d_estimate: float | None = None
    max_iters: int = 1_000_000
    max_wall_seconds: float = 1800.0
    seed: int = 0

    def __post_init__(self):
        for name in ("epsilon", "max_iters", "max_wall_seconds"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")
        for name in ("lipschitz", "fixed_n", "d_estimate"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive when given, got {value!r}")


def cg_run(obj, lmo, config: BaselineConfig, y0: Point | None = None, callback=None) -> SolveResult:
    """Conditional gradient with ``gamma_k = 2/(k+1)``.

    Iteration ``k`` evaluates ``grad f(y_{k-1})``, calls the LMO once, reads
    the Wolfe gap of ``y_{k-1}`` off that same call and either stops or sets
    ``y_k = (1 - gamma_k) y_{k-1} + gamma_k x_k``.  The trace starts at
    ``k = 0`` (the initial point); record ``k`` carries the Wolfe gap of
    ``y_k`` once it has been computed.  ``callback(k, y_k)`` is called for
    every iterate, including ``y_0``.
    """
    dim = lmo.ambient_dim
    if y0 is None:
        y0, _ = lmo.minimize(np.zeros(dim))
    y = check_point(y0, dim).copy()
    t0 = time.perf_counter()
    trace: list[TraceRecord] = []
    f_y = float(obj.value(y))
    best_y, best_f = y, f_y
    termination = Termination.MAX_OUTER
    gap = None
    calls = 0

    def record(k, gamma, f, cum):
        return TraceRecord(k=k, l_k=math.nan, gamma=gamma, big_gamma=math.nan, beta=math.nan,
                           eta=math.nan, inner_iters=1 if k else 0, f_y=f, lower_bound=None,
                           cert_gap=None, wolfe_gap=None, cum_lmo=cum, cum_backtracks=0,
                           elapsed_seconds=time.perf_counter() - t0)

    trace.append(record(0, math.nan, f_y, 0))
    if callback is not None:
        callback(0, y)
    k = 0
    while True:
        g = _eval(obj, y)[1]
        v, value = lmo.minimize(g)
        calls += 1
        gap = float(g @ y) - value
        trace[-1] = replace(trace[-1], wolfe_gap=gap)
        if gap <= config.epsilon:
            termination = Termination.CERTIFIED
            break
        if k >= config.max_iters:
            break
        if time.perf_counter() - t0 >= config.max_wall_seconds:
            termination = Termination.MAX_TIME
            break
        k += 1
        gamma = 2.0 / (k + 1)
        y = (1.0 - gamma) * y + gamma * v
        f_y = float(obj.value(y))
        if f_y < best_f:
            best_y, best_f = y, f_y
        trace.append(record(k, gamma, f_y, calls))
        if callback is not None:
            callback(k, y)

    if termination is not Termination.CERTIFIED:
        y, f_y = best_y, best_f
    return SolveResult(
        y_final=y, f_final=f_y, cert_gap_final=None, outer_iters=calls, total_lmo=calls,
        total_backtracks=0, termination=termination, trace=trace, grad_evals=calls,
        cert_check_lmo=0, wolfe_gap_final=gap, elapsed_seconds=time.perf_counter() - t0,
    )


def default_fixed_n(lipschitz: float, d: float, epsilon: float) -> int:
    return max(1, math.ceil(math.sqrt(12.0 * lipschitz * d * d / epsilon)))


def cgs_run(obj, lmo, config: BaselineConfig, y0: Point | None = None) -> SolveResult:
    """Conditional gradient sliding with ``L_k = L`` fixed.

    Parameters ``gamma_k = 2/(k+1)``, ``beta_k = 2L/k``,
    ``eta_k = 2 L D^2 / (N k)``; stops when the Wolfe gap of ``y_k`` drops to
    ``epsilon``.  The gap costs one extra gradient and one extra LMO call
    per iteration, reported as ``cert_check_lmo``.
    """
    lip = config.lipschitz if config.lipschitz is not None else obj.lipschitz_hint
    if lip is None:
        raise ValueError("CGS needs a Lipschitz constant (config.lipschitz or obj.lipschitz_hint)")
    d = config.d_estimate or lmo.diameter_exact
    if not d:
        raise ValueError("CGS needs a diameter estimate")
    n = config.fixed_n or default_fixed_n(lip, d, config.epsilon)
    inner = SolverConfig(
        epsilon=config.epsilon, l0=lip, d_estimate=d, schedule=Schedule.FIXED_N_QUAD,
        fixed_n=n, max_outer=config.max_iters, max_wall_seconds=config.max_wall_seconds,
        seed=config.seed,
    )
    return _sliding_loop(obj, lmo, inner, y0, backtrack=False, stop="wolfe", l_fixed=lip, d=d)
