"""Power iteration for the dominant eigenpair of a symmetric PSD matrix."""

from __future__ import annotations

import hashlib

import numpy as np

from .core import EigenSolverError


def hashed_start(data: np.ndarray, size: int) -> np.ndarray:
    """Deterministic unit start vector derived from the bytes of ``data``."""
    digest = hashlib.blake2b(np.ascontiguousarray(data).tobytes(), digest_size=8).digest()
    rng = np.random.Generator(np.random.Philox(int.from_bytes(digest, "little")))
    v = rng.standard_normal(size)
    return v / np.linalg.norm(v)


def dominant_eigenpair(M: np.ndarray, start: np.ndarray, tol: float = 1e-9, cap: int = 64):
    """Largest eigenvalue and a unit eigenvector of the symmetric PSD matrix ``M``.

    Power iteration where the iteration matrix is squared after every
    step, so step ``j`` applies ``M^(2^j)``; this keeps the iteration count
    logarithmic in the inverse spectral gap.  Stops once the eigen-residual
    ``||M v - rho v||`` drops to ``tol * ||M||_F``.

    Raises
    ------
    EigenSolverError
        If ``cap`` squarings do not reach the tolerance.
    """
    scale = np.linalg.norm(M)
    v = start / np.linalg.norm(start)
    if scale == 0.0:
        return 0.0, v
    B = M / scale
    residual = np.inf
    for _ in range(cap):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start orthogonal to the range of B: restart along a row of B
            w = B[np.argmax(np.abs(B).sum(axis=1))]
            nw = np.linalg.norm(w)
        v = w / nw
        Mv = M @ v
        rho = float(v @ Mv)
        residual = float(np.linalg.norm(Mv - rho * v))
        if residual <= tol * scale:
            return rho, v
        B = B @ B
        B /= np.linalg.norm(B)
        B = 0.5 * (B + B.T)
    raise EigenSolverError(f"power iteration stalled, residual {residual:.3e}", residual)
