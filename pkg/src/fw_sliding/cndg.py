"""Inner conditional-gradient loop for the prox subproblem

    min_{x in X} <g, x> + (beta/2) ||x - u||^2

solved to the Wolfe-type accuracy ``max_x <g + beta (u+ - u), u+ - x> <= eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ALPHA_DENOM_GUARD, InnerCapExceeded, LmoInconsistencyError, LMO_VALUE_RTOL, Point


@dataclass(frozen=True)
class CndgResult:
    u_plus: Point
    inner_iters: int
    final_gap: float


def default_inner_cap(beta: float, eta: float, diameter: float) -> int:
    return 10 * max(1, math.ceil(6.0 * beta * diameter**2 / eta))


def cndg(g: Point, u: Point, beta: float, eta: float, lmo, cap: int,
         check_lmo_value: bool = False) -> CndgResult:
    """Approximately solve the prox subproblem by conditional gradient steps.

    Every step costs one LMO call ``v_t = lmo(g + beta (u_t - u))``; the gap
    ``V = <g + beta (u_t - u), u_t - v_t>`` is read off the returned value.
    Steps use the exact line search on the segment ``[u_t, v_t]``, clipped
    to 1.

    Raises
    ------
    InnerCapExceeded
        After ``cap`` LMO calls without reaching ``V <= eta``.
    LmoInconsistencyError
        If the gap is positive although the LMO returned the current iterate.
    """
    if not (beta > 0 and eta > 0):
        raise ValueError("beta and eta must be positive")
    ut = np.array(u, dtype=float)
    best, best_gap = ut, math.inf
    for t in range(1, cap + 1):
        h = g + beta * (ut - u)
        v, value = lmo.minimize(h)
        if check_lmo_value:
            direct = float(h @ v)
            if abs(direct - value) > LMO_VALUE_RTOL * max(1.0, abs(direct)):
                raise LmoInconsistencyError(f"LMO value {value} disagrees with <h, v> = {direct}")
        gap = float(h @ ut) - value
        if gap < best_gap:
            best, best_gap = ut, gap
        if gap <= eta:
            return CndgResult(ut, t, gap)
        d = v - ut
        dd = float(d @ d)
        if dd < ALPHA_DENOM_GUARD:
            if gap > eta + 1e-9 * max(1.0, abs(value)):
                raise LmoInconsistencyError(
                    f"gap {gap:.3e} > eta {eta:.3e} but the LMO returned the current iterate"
                )
            return CndgResult(ut, t, gap)
        alpha = min(1.0, gap / (beta * dd))
        ut = ut + alpha * d
    raise InnerCapExceeded(
        f"inner loop hit its cap of {cap} LMO calls (gap {best_gap:.3e} > eta {eta:.3e})",
        best, best_gap, cap,
    )


def verify_inner_condition(g: Point, u: Point, beta: float, eta: float, u_plus: Point, lmo) -> float:
    """``max_{x in X} <g + beta (u+ - u), u+ - x>`` recomputed with one LMO call.

    ``eta`` is not used in the computation; callers compare the result
    against it.
    """
    h = g + beta * (u_plus - u)
    _, value = lmo.minimize(h)
    return float(h @ u_plus) - value
