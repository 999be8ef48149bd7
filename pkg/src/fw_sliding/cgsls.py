"""Conditional gradient sliding with backtracking linesearch (CGS-ls).

Each outer iteration guesses a Lipschitz estimate ``L``, builds the
extrapolation point ``z = (1 - gamma) y + gamma x``, takes an inexact prox
step ``x+ = CndG(grad f(z), x, beta, eta)`` and averages ``y+ = (1 - gamma) y +
gamma x+``.  If the quadratic upper model with slack ``(eps/2) gamma`` fails
at ``y+`` the estimate is doubled and the iteration is redone.  The affine
under-estimator ``xi_k`` accumulated from the tangent planes at the ``z``'s
certifies ``f(y) - f* <= eps`` once ``f(y) - min_X xi_k <= eps``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .cndg import cndg, default_inner_cap, verify_inner_condition
from .core import (
    ABS_TOL,
    GAMMA_RESIDUAL_RTOL,
    MAX_DOUBLINGS,
    BacktrackingError,
    CorruptObjectiveError,
    InvariantViolation,
    Point,
    Schedule,
    SolveResult,
    SolverConfig,
    SolverState,
    Termination,
    TraceRecord,
    check_point,
)

log = logging.getLogger(__name__)


def _check_gamma_inputs(gamma_prev_big: float, l_k: float) -> None:
    if not (gamma_prev_big > 0 and l_k > 0 and math.isfinite(gamma_prev_big) and math.isfinite(l_k)):
        raise ValueError(f"need positive finite inputs, got Gamma_prev={gamma_prev_big}, L={l_k}")


def solve_gamma_cubic(gamma_prev_big: float, l_k: float) -> float:
    """Positive root of ``L g^3 = G (1 - g)`` with ``G = gamma_prev_big``.

    Newton on ``p(g) = g^3 + r g - r``, ``r = G / L``.  ``p`` is increasing
    and convex on ``g > 0``, so Newton started to the right of the root
    decreases monotonically onto it; bisection takes over if an iterate
    ever leaves the bracket.
    """
    _check_gamma_inputs(gamma_prev_big, l_k)
    r = gamma_prev_big / l_k
    lo, hi = 0.0, min(1.0, r ** (1.0 / 3.0))
    g = hi
    for _ in range(200):
        p = g * g * g + r * g - r
        if p == 0.0:
            break
        if p > 0:
            hi = g
        else:
            lo = g
        step = p / (3.0 * g * g + r)
        nxt = g - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - g) <= 4.0 * np.finfo(float).eps * g:
            g = nxt
            break
        g = nxt
    return g


def solve_gamma_quadratic(gamma_prev_big: float, l_k: float) -> float:
    """Positive root of ``L g^2 = G (1 - g)``; rationalized quadratic formula."""
    _check_gamma_inputs(gamma_prev_big, l_k)
    r = gamma_prev_big / l_k
    g = 2.0 * r / (r + math.sqrt(r * r + 4.0 * r))
    # one Newton polish on g^2 + r g - r
    return g - (g * g + r * g - r) / (2.0 * g + r)


@dataclass(frozen=True)
class StepParams:
    gamma: float
    big_gamma: float
    beta: float
    eta: float


def schedule_params(schedule: Schedule, k: int, l_k: float, big_gamma_prev: float,
                    d: float, fixed_n: int | None = None) -> StepParams:
    """Stepsize, weight, prox parameter and inner accuracy for iteration ``k``."""
    if schedule is Schedule.LS_CUBIC:
        gamma = 1.0 if k == 1 else solve_gamma_cubic(big_gamma_prev, l_k)
        return StepParams(gamma, l_k * gamma**3, l_k * gamma, l_k * gamma * d * d / k)
    if schedule is Schedule.FIXED_N_QUAD:
        return StepParams(2.0 / (k + 1), 2.0 / (k * (k + 1)), 2.0 * l_k / k,
                          2.0 * l_k * d * d / (fixed_n * k))
    if schedule is Schedule.FIXED_N_SQ:
        gamma = 1.0 if k == 1 else solve_gamma_quadratic(big_gamma_prev, l_k)
        return StepParams(gamma, l_k * gamma**2, l_k * gamma, l_k * gamma * d * d / fixed_n)
    raise ValueError(f"unknown schedule {schedule!r}")


def lower_bound_update(state: SolverState, z_k: Point, f_z: float, grad_z: Point,
                       gamma_k: float) -> SolverState:
    """``xi_k = (1 - gamma) xi_{k-1} + gamma (f(z) + <grad f(z), . - z>)``."""
    state.lb_const = (1.0 - gamma_k) * state.lb_const + gamma_k * (f_z - float(grad_z @ z_k))
    state.lb_grad = (1.0 - gamma_k) * state.lb_grad + gamma_k * grad_z
    return state


def lower_bound_min(state: SolverState, lmo) -> float:
    """``min_{x in X} xi_k(x)``; one LMO call."""
    _, value = lmo.minimize(state.lb_grad)
    return state.lb_const + value


def _eval(obj, x: Point) -> tuple[float, Point]:
    f = float(obj.value(x))
    g = np.asarray(obj.gradient(x), dtype=float)
    if not (math.isfinite(f) and np.all(np.isfinite(g))):
        raise CorruptObjectiveError("objective returned a non-finite value or gradient")
    return f, g


@dataclass
class _RunLog:
    """Bookkeeping a run keeps beside the state (for bound checks)."""

    inner_calls: list
    max_inner_violation: float | None = None


def backtracking_step(state: SolverState, obj, lmo, config: SolverConfig, *,
                      backtrack: bool = True, l_fixed: float | None = None,
                      d: float | None = None, runlog: _RunLog | None = None) -> SolverState:
    """Advance ``state`` by one accepted outer iteration.

    Starting from ``L = L_{k-1}`` the iteration is computed and the upper
    model tested at ``y_k``; on failure ``L`` doubles and everything from
    ``gamma_k`` on is recomputed.  With ``backtrack=False`` the first
    candidate is accepted unconditionally (fixed-L CGS).
    """
    k = state.k + 1
    d = config.d_estimate if d is None else d
    eps = config.epsilon
    cap_diam = max(d, lmo.diameter_exact or 0.0)
    l_cand = state.l_k if l_fixed is None else l_fixed
    cached = None  # (gamma, z, f_z, grad_z): reuse while gamma does not move

    for doubling in range(MAX_DOUBLINGS + 1):
        p = schedule_params(config.schedule, k, l_cand, state.big_gamma, d, config.fixed_n)
        if cached is not None and cached[0] == p.gamma:
            _, z, f_z, grad_z = cached
        else:
            z = (1.0 - p.gamma) * state.y + p.gamma * state.x
            f_z, grad_z = _eval(obj, z)
            state.n_grad_evals += 1
            cached = (p.gamma, z, f_z, grad_z)
        cap = config.max_inner_per_call or default_inner_cap(p.beta, p.eta, cap_diam)
        res = cndg(grad_z, state.x, p.beta, p.eta, lmo, cap, check_lmo_value=config.verify_certificates)
        state.n_lmo_calls += res.inner_iters
        if runlog is not None:
            runlog.inner_calls.append((k, p.beta, p.eta, res.inner_iters))
        if config.verify_certificates:
            gap = verify_inner_condition(grad_z, state.x, p.beta, p.eta, res.u_plus, lmo)
            excess = gap - p.eta
            if runlog is not None:
                runlog.max_inner_violation = max(excess, runlog.max_inner_violation or -math.inf)
            if excess > ABS_TOL:
                raise InvariantViolation(f"inner solve at k={k} has gap {gap:.3e} > eta {p.eta:.3e}")
        y_new = (1.0 - p.gamma) * state.y + p.gamma * res.u_plus
        f_y = float(obj.value(y_new))
        if not math.isfinite(f_y):
            raise CorruptObjectiveError("objective returned a non-finite value")
        step = y_new - z
        model = f_z + float(grad_z @ step) + 0.5 * l_cand * float(step @ step) + 0.5 * eps * p.gamma
        if not backtrack or f_y <= model:
            break
        log.debug("k=%d: upper model fails at L=%.6g, doubling", k, l_cand)
        l_cand *= 2.0
        state.n_backtracks += 1
    else:
        raise BacktrackingError(
            f"Lipschitz estimate doubled {MAX_DOUBLINGS} times at k={k}; objective not smooth?"
        )

    if config.verify_certificates and config.schedule is Schedule.LS_CUBIC:
        if abs(p.big_gamma - l_cand * p.gamma**3) > GAMMA_RESIDUAL_RTOL * p.big_gamma:
            raise InvariantViolation(f"Gamma_k != L_k gamma_k^3 at k={k}")

    state.k = k
    state.l_k = l_cand
    state.gamma, state.big_gamma, state.beta, state.eta = p.gamma, p.big_gamma, p.beta, p.eta
    state.z = z
    state.x = res.u_plus
    state.y = y_new
    state.f_y = f_y
    state.inner_iters = res.inner_iters
    lower_bound_update(state, z, f_z, grad_z, p.gamma)
    return state


def run(obj, lmo, config: SolverConfig, y0: Point | None = None) -> SolveResult:
    """Run CGS-ls until the lower-bound certificate reaches ``config.epsilon``.

    ``y0`` defaults to the vertex the LMO returns for the zero objective.
    """
    return _sliding_loop(obj, lmo, config, y0, backtrack=True, stop="certificate")


def _sliding_loop(obj, lmo, config: SolverConfig, y0, *, backtrack: bool, stop: str,
                  l_fixed: float | None = None, d: float | None = None) -> SolveResult:
    dim = lmo.ambient_dim
    if obj.dim != dim:
        raise ValueError(f"objective lives in R^{obj.dim}, feasible set in R^{dim}")
    if y0 is None:
        y0, _ = lmo.minimize(np.zeros(dim))
    y0 = check_point(y0, dim)
    if config.verify_certificates and not lmo.contains(y0, ABS_TOL):
        raise ValueError("starting point is not feasible")

    state = SolverState.initial(y0, config.l0 if l_fixed is None else l_fixed)
    runlog = _RunLog(inner_calls=[])
    trace: list[TraceRecord] = []
    t0 = time.perf_counter()
    best_y, best_f = y0, math.inf
    termination = Termination.MAX_OUTER
    cert_gap = wolfe = None
    extra_grad = 0

    while state.k < config.max_outer:
        backtracking_step(state, obj, lmo, config, backtrack=backtrack, l_fixed=l_fixed,
                          d=d, runlog=runlog)
        lower = None
        if stop == "certificate":
            lower = lower_bound_min(state, lmo)
            cert_gap = state.f_y - lower
            done = cert_gap <= config.epsilon
        else:
            g_y = _eval(obj, state.y)[1]
            extra_grad += 1
            _, val = lmo.minimize(g_y)
            wolfe = float(g_y @ state.y) - val
            done = wolfe <= config.epsilon
        state.n_cert_lmo_calls += 1
        if state.f_y < best_f:
            best_y, best_f = state.y, state.f_y
        elapsed = time.perf_counter() - t0
        trace.append(TraceRecord(
            k=state.k, l_k=state.l_k, gamma=state.gamma, big_gamma=state.big_gamma,
            beta=state.beta, eta=state.eta, inner_iters=state.inner_iters, f_y=state.f_y,
            lower_bound=lower, cert_gap=cert_gap if stop == "certificate" else None,
            wolfe_gap=wolfe if stop != "certificate" else None,
            cum_lmo=state.n_lmo_calls + state.n_cert_lmo_calls,
            cum_backtracks=state.n_backtracks, elapsed_seconds=elapsed,
        ))
        log.info("k=%d L=%.4g f(y)=%.6e gap=%.3e", state.k, state.l_k, state.f_y,
                 cert_gap if stop == "certificate" else wolfe)
        if done:
            termination = Termination.CERTIFIED
            break
        if elapsed >= config.max_wall_seconds:
            termination = Termination.MAX_TIME
            break

    if termination is Termination.CERTIFIED:
        y_final, f_final = state.y, state.f_y
    else:
        y_final, f_final = best_y, best_f
    return SolveResult(
        y_final=y_final, f_final=f_final,
        cert_gap_final=cert_gap if stop == "certificate" else None,
        outer_iters=state.k, total_lmo=state.n_lmo_calls + state.n_cert_lmo_calls,
        total_backtracks=state.n_backtracks, termination=termination, trace=trace,
        grad_evals=state.n_grad_evals + extra_grad, cert_check_lmo=state.n_cert_lmo_calls,
        wolfe_gap_final=wolfe, elapsed_seconds=time.perf_counter() - t0,
        inner_calls=runlog.inner_calls, max_inner_violation=runlog.max_inner_violation,
        lb_const=state.lb_const if stop == "certificate" else None,
        lb_grad=state.lb_grad.copy() if stop == "certificate" else None,
    )


# --- complexity bounds and trace invariants -------------------------------------------


def lipschitz_ceiling(l0: float, l_min: float) -> float:
    """``max{2 L_min, L_0}``: no estimate ever exceeds it."""
    return max(2.0 * l_min, l0)


def n_grad_bound(l0: float, l_min: float, d: float, d_x: float, epsilon: float) -> float:
    """Outer iterations after which the certificate is guaranteed to fire."""
    big_l = lipschitz_ceiling(l0, l_min)
    c = math.sqrt(13.5 + 27.0 * d * d / (d_x * d_x)) * (big_l / l0) ** (1.0 / 6.0)
    return c * math.sqrt(big_l * d_x * d_x / epsilon)


def n_lin_bound(l0: float, l_min: float, d: float, d_x: float, epsilon: float) -> float:
    """Inner LMO calls performed by the time the certificate fires."""
    n_grad = n_grad_bound(l0, l_min, d, d_x, epsilon)
    return 6.0 * d_x * d_x / (d * d) * n_grad * n_grad + n_grad


def inner_call_bound(beta: float, eta: float, d_x: float) -> int:
    """``ceil(6 beta D_X^2 / eta)``: LMO calls one inner solve may need."""
    return math.ceil(6.0 * beta * d_x * d_x / eta)


def _check(ok: bool, measured, bound) -> dict:
    return {"pass": bool(ok), "measured": measured, "bound": bound}


def check_invariants(result: SolveResult, l0: float, l_min: float, d: float, d_x: float,
                     epsilon: float) -> dict[str, dict]:
    """Evaluate every provable property of an LS_CUBIC trace.

    Returns a map from check name to ``{"pass", "measured", "bound"}``.
    """
    tr = result.trace
    big_l = lipschitz_ceiling(l0, l_min)
    ks = np.array([r.k for r in tr], dtype=float)
    gammas = np.array([r.gamma for r in tr])
    big = np.array([r.big_gamma for r in tr])
    ls = np.array([r.l_k for r in tr])
    checks = {}

    n_grad = n_grad_bound(l0, l_min, d, d_x, epsilon)
    checks["n_grad_bound"] = _check(result.outer_iters <= n_grad, result.outer_iters, n_grad)
    n_lin = n_lin_bound(l0, l_min, d, d_x, epsilon)
    checks["n_lin_bound"] = _check(result.inner_lmo <= n_lin, result.inner_lmo, n_lin)
    excess = max((t - inner_call_bound(b, e, d_x) - 1 for _, b, e, t in result.inner_calls), default=0)
    checks["inner_call_bound"] = _check(excess <= 0, excess, 0)

    ratio_sum = np.cumsum(gammas / big)
    sumone = float(np.max(np.abs(big * ratio_sum - 1.0), initial=0.0))
    checks["sumone_residual"] = _check(sumone <= 1e-10, sumone, 1e-10)
    if len(tr) > 1:
        rec = np.abs(big[1:] - big[:-1] * (1.0 - gammas[1:])) / big[:-1]
        rec_max = float(rec.max())
    else:
        rec_max = 0.0
    checks["gamma_recursion"] = _check(rec_max <= 1e-12, rec_max, 1e-12)
    cubic = float(np.max(np.abs(big - ls * gammas**3) / big, initial=0.0))
    checks["gamma_cubic"] = _check(cubic <= 1e-12, cubic, 1e-12)

    lower_ok = bool(np.all(big >= l0 / ks**3 * (1 - 1e-12)))
    upper_ok = bool(np.all(big <= 27.0 * big_l / ks**3 * (1 + 1e-12)))
    worst = float(np.max(np.maximum(l0 / ks**3 / big, big * ks**3 / (27.0 * big_l)), initial=0.0))
    checks["gamma_sandwich"] = _check(lower_ok and upper_ok, worst, 1.0)

    mono = bool(np.all(np.diff(ls) >= 0)) and (len(ls) == 0 or ls[0] >= l0)
    l_max = float(ls.max(initial=l0))
    checks["l_bound"] = _check(mono and l_max <= big_l * (1 + 1e-12), l_max, big_l)

    in_range = len(tr) == 0 or (gammas[0] == 1.0 and bool(np.all((gammas[1:] > 0) & (gammas[1:] < 1))))
    dec = bool(np.all(np.diff(gammas) < 0))
    checks["gamma_range"] = _check(in_range and dec, float(gammas.min(initial=1.0)), 1.0)
    return checks
