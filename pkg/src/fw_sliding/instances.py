"""Seeded test instances with a planted zero-residual solution.

Random streams come from numpy's Philox (a counter-based 64-bit
generator).  Each instance derives one child stream per component from
``SeedSequence(seed)``: the sparsity pattern, the nonzero values and the
planted solution.  Adding a component never shifts the others.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .core import EigenSolverError, Point
from .linalg import dominant_eigenpair
from .oracles import MAX_CYCLE_NODES, num_edges, tour_to_incidence

PATTERN, VALUES, PLANTED = 0, 1, 2


def component_rng(seed: int, component: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(component,))
    return np.random.Generator(np.random.Philox(ss))


class QuadraticObjective:
    """``f(x) = 0.5 ||A x - b||^2`` with ``grad f(x) = A^T (A x - b)``.

    ``op`` may be a dense array or any scipy sparse matrix; it is stored in
    CSR form when sparse.
    """

    def __init__(self, op, rhs, lipschitz_hint: float | None = None):
        self.op = op.tocsr() if sp.issparse(op) else np.asarray(op, dtype=float)
        self.rhs = np.asarray(rhs, dtype=float)
        if self.op.shape[0] != self.rhs.shape[0]:
            raise ValueError("operator rows and right-hand side disagree")
        self.dim = self.op.shape[1]
        self.lipschitz_hint = lipschitz_hint
        self._opT = self.op.T.tocsr() if sp.issparse(self.op) else self.op.T

    def residual(self, x: Point) -> np.ndarray:
        return self.op @ x - self.rhs

    def value(self, x: Point) -> float:
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def gradient(self, x: Point) -> Point:
        return self._opT @ self.residual(x)

    def gram(self) -> np.ndarray:
        """Dense ``A^T A``."""
        g = self._opT @ self.op
        return g.toarray() if sp.issparse(g) else np.asarray(g)


class Family(str, enum.Enum):
    SPECTRAHEDRON = "SPECTRAHEDRON"
    HAMILTONIAN = "HAMILTONIAN"
    SIMPLEX = "SIMPLEX"
    SEGMENT = "SEGMENT"  # 0.5 ||x||^2 on the 2-simplex, optimum 1/4 at (1/2, 1/2)


@dataclass(frozen=True)
class InstanceSpec:
    family: Family
    m: int
    n: int
    density: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")

    def to_json(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        return d

    @property
    def optimal_value(self) -> float:
        return 0.25 if self.family is Family.SEGMENT else 0.0


def _sparse_operator(m: int, d: int, density: float, seed: int, sampler) -> sp.csr_matrix:
    mask = component_rng(seed, PATTERN).random((m, d)) < density
    rows, cols = np.nonzero(mask)
    vals = sampler(component_rng(seed, VALUES), rows.size)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, d))


def gen_spectrahedron(m: int, n: int, density: float, seed: int):
    """Least squares over n x n matrices, ``B = A(U diag(s) U^T)`` with ``sum s = 1``.

    Returns ``(objective, planted)`` with ``planted`` the flattened matrix.
    """
    A = _sparse_operator(m, n * n, density, seed, lambda rng, k: rng.standard_normal(k))
    rng = component_rng(seed, PLANTED)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    U = Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
    s = rng.random(n)
    s /= s.sum()
    X = (U * s) @ U.T
    X = 0.5 * (X + X.T)
    X /= np.trace(X)
    planted = X.ravel()
    return QuadraticObjective(A, A @ planted), planted


def random_tour(rng: np.random.Generator, n: int) -> list[int]:
    return [int(i) for i in rng.permutation(n)]


def gen_hamiltonian(m: int, n: int, density: float, seed: int):
    """Least squares over the cycle hull, ``b = A(0.8 v1 + 0.2 v2)`` for random tours."""
    if not 3 <= n <= MAX_CYCLE_NODES:
        raise ValueError(f"need 3 <= n <= {MAX_CYCLE_NODES}, got {n}")
    A = _sparse_operator(m, num_edges(n), density, seed, lambda rng, k: rng.random(k))
    rng = component_rng(seed, PLANTED)
    v1 = tour_to_incidence(random_tour(rng, n), n)
    v2 = tour_to_incidence(random_tour(rng, n), n)
    planted = 0.8 * v1 + 0.2 * v2
    return QuadraticObjective(A, A @ planted), planted


def gen_simplex(m: int, n: int, seed: int):
    """Dense Gaussian least squares on the n-simplex with a uniform planted point."""
    A = component_rng(seed, VALUES).standard_normal((m, n))
    planted = component_rng(seed, PLANTED).dirichlet(np.ones(n))
    return QuadraticObjective(A, A @ planted), planted


def gen_segment():
    """``0.5 ||x||^2`` on the segment between (1, 0) and (0, 1)."""
    return QuadraticObjective(np.eye(2), np.zeros(2), lipschitz_hint=1.0), np.array([0.5, 0.5])


def generate(spec: InstanceSpec):
    """Objective and planted solution for ``spec``."""
    if spec.family is Family.SPECTRAHEDRON:
        return gen_spectrahedron(spec.m, spec.n, spec.density, spec.seed)
    if spec.family is Family.HAMILTONIAN:
        return gen_hamiltonian(spec.m, spec.n, spec.density, spec.seed)
    if spec.family is Family.SIMPLEX:
        return gen_simplex(spec.m, spec.n, spec.seed)
    return gen_segment()


def estimate_lmin(obj: QuadraticObjective, tol: float = 1e-8, cap: int = 64) -> float:
    """``lambda_max(A^T A)``, the smallest valid Lipschitz constant of the gradient.

    Power iteration (with squaring) on the dense Gram matrix, so the
    result is accurate to ``tol`` relative.  Raises EigenSolverError when
    ``cap`` squarings do not suffice.
    """
    G = obj.gram()
    start = np.ones(G.shape[0]) / math.sqrt(G.shape[0])
    # all-ones start has nonzero overlap with the top eigenvector of a nonnegative
    # Gram matrix; a fixed pseudo-random tilt covers the general case
    start = start + 1e-3 * component_rng(0, 0).standard_normal(G.shape[0])
    lam, _ = dominant_eigenpair(G, start, tol=tol, cap=cap)
    if lam < 0:
        raise EigenSolverError("negative Rayleigh quotient for a Gram matrix", abs(lam))
    return lam
