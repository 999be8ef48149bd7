"""Linear minimization oracles over the simplex, the spectrahedron and the
Hamiltonian-cycle polytope, plus brute-force counterparts used to check them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import ABS_TOL, DEFAULT_EIG_TOL, Point
from .linalg import dominant_eigenpair, hashed_start


@dataclass(frozen=True)
class SimplexLmo:
    """Standard simplex ``{x >= 0, sum x = 1}`` in R^n."""

    n: int
    set_id: str = "simplex"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("simplex dimension must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def diameter_exact(self) -> float:
        return math.sqrt(2.0) if self.n > 1 else 0.0

    def minimize(self, g: Point) -> tuple[Point, float]:
        g = np.asarray(g, dtype=float)
        if g.size == 0:
            raise ValueError("empty linear objective")
        if g.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {g.shape}")
        i = int(np.argmin(g))  # first occurrence, i.e. lowest index on ties
        v = np.zeros(self.n)
        v[i] = 1.0
        return v, float(g[i])

    def contains(self, p: Point, tol: float = ABS_TOL) -> bool:
        return bool(np.all(p >= -tol) and abs(p.sum() - 1.0) <= tol)

    def vertices(self):
        for i in range(self.n):
            v = np.zeros(self.n)
            v[i] = 1.0
            yield v


def sym_from_flat(x: Point, n: int) -> np.ndarray:
    X = np.asarray(x, dtype=float).reshape(n, n)
    return 0.5 * (X + X.T)


@dataclass(frozen=True)
class SpectrahedronLmo:
    """Standard spectrahedron ``{X symmetric, X >= 0, tr X = 1}`` on n x n matrices.

    Minimizing ``<G, X>`` selects ``v v^T`` for a unit eigenvector ``v`` of
    the smallest eigenvalue of ``G``.  It is computed as the dominant
    eigenvector of ``sigma I - G``, where ``sigma`` is the largest
    Gershgorin row bound.
    """

    n: int
    eig_tol: float = DEFAULT_EIG_TOL
    eig_cap: int = 64
    set_id: str = "spectrahedron"

    @property
    def ambient_dim(self) -> int:
        return self.n * self.n

    @property
    def diameter_exact(self) -> float:
        return math.sqrt(2.0) if self.n > 1 else 0.0

    def min_eigvec(self, G: np.ndarray) -> np.ndarray:
        sigma = float(np.max(np.diag(G) + np.abs(G).sum(axis=1) - np.abs(np.diag(G))))
        shifted = sigma * np.eye(self.n) - G
        start = hashed_start(G, self.n)
        _, v = dominant_eigenpair(shifted, start, tol=self.eig_tol, cap=self.eig_cap)
        return v

    def minimize(self, g: Point) -> tuple[Point, float]:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.ambient_dim,):
            raise ValueError(f"expected a flattened {self.n}x{self.n} matrix")
        v = self.min_eigvec(sym_from_flat(g, self.n))
        vertex = np.outer(v, v).ravel()
        return vertex, float(g @ vertex)

    def contains(self, p: Point, tol: float = ABS_TOL) -> bool:
        X = np.asarray(p, dtype=float).reshape(self.n, self.n)
        if np.max(np.abs(X - X.T), initial=0.0) > tol:
            return False
        if abs(np.trace(X) - 1.0) > tol:
            return False
        return bool(np.linalg.eigvalsh(0.5 * (X + X.T))[0] >= -tol)


# --- Hamiltonian cycles -------------------------------------------------------
#
# Edge {i, j} with i > j is coordinate i*(i-1)/2 + j, i.e. the row-major
# order of the strictly lower triangle of the adjacency matrix.

MAX_CYCLE_NODES = 16


def edge_index(i: int, j: int) -> int:
    if i == j:
        raise ValueError("no self loops")
    if i < j:
        i, j = j, i
    return i * (i - 1) // 2 + j


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def cost_matrix(c: Point, n: int) -> np.ndarray:
    """Symmetric n x n cost matrix of an edge-cost vector (zero diagonal)."""
    C = np.zeros((n, n))
    rows, cols = np.tril_indices(n, -1)
    C[rows, cols] = c
    C[cols, rows] = c
    return C


def tour_to_incidence(tour, n: int) -> Point:
    x = np.zeros(num_edges(n))
    for a, b in zip(tour, tour[1:] + tour[:1]):
        x[edge_index(a, b)] = 1.0
    return x


def is_cycle_vertex(x: Point, n: int, tol: float = ABS_TOL) -> bool:
    """0/1 vector with exactly n edges, every degree 2, one connected cycle."""
    x = np.asarray(x, dtype=float)
    if x.shape != (num_edges(n),):
        return False
    if not np.all((np.abs(x) <= tol) | (np.abs(x - 1.0) <= tol)):
        return False
    chosen = x > 0.5
    if chosen.sum() != n:
        return False
    rows, cols = np.tril_indices(n, -1)
    adj = [[] for _ in range(n)]
    for a, b in zip(rows[chosen], cols[chosen]):
        adj[a].append(int(b))
        adj[b].append(int(a))
    if any(len(nb) != 2 for nb in adj):
        return False
    seen, prev, cur = 1, -1, 0
    nxt = adj[0][0]
    while nxt != 0:
        prev, cur = cur, nxt
        seen += 1
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
    return seen == n


def held_karp(C: np.ndarray) -> tuple[list[int], float]:
    """Exact minimum-cost Hamiltonian cycle of a symmetric cost matrix.

    Returns the tour as a node sequence starting at 0 and its cost.  Among
    optimal tours the lexicographically smallest sequence is returned.

    ``dp[S, j]`` is the cheapest path leaving node 0, visiting exactly the
    nodes of ``S`` (a bitmask over nodes 1..n-1) and ending at ``j``.  Costs
    are symmetric, so it is also the cheapest path from ``j`` through ``S``
    back to 0, which is what the forward reconstruction uses.
    """
    n = C.shape[0]
    m = n - 1
    full = (1 << m) - 1
    inner = C[1:, 1:]
    dp = np.full((1 << m, m), np.inf)
    for j in range(m):
        dp[1 << j, j] = C[0, j + 1]
    masks = np.arange(1 << m)
    popcount = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        popcount += (masks >> b) & 1
    for size in range(2, m + 1):
        layer = masks[popcount == size]
        for j in range(m):
            sel = layer[((layer >> j) & 1) == 1]
            prev = sel ^ (1 << j)
            dp[sel, j] = np.min(dp[prev] + inner[:, j], axis=1)
    closing = dp[full] + C[0, 1:]
    best = float(closing.min())

    tol = 1e-9 * max(1.0, abs(best))
    tour, cur, remaining, budget = [0], 0, full, best
    while remaining:
        for a in range(m):
            if (remaining >> a) & 1 and C[cur, a + 1] + dp[remaining, a] <= budget + tol:
                budget = dp[remaining, a]
                cur = a + 1
                remaining ^= 1 << a
                tour.append(cur)
                break
        else:  # pragma: no cover - unreachable with exact dp values
            raise RuntimeError("Held-Karp reconstruction lost the optimal tour")
    return tour, best


@dataclass(frozen=True)
class HamiltonianLmo:
    """Convex hull of edge-incidence vectors of Hamiltonian cycles of K_n."""

    n: int
    set_id: str = "hamiltonian"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("a Hamiltonian cycle needs at least 3 nodes")
        if self.n > MAX_CYCLE_NODES:
            raise ValueError(f"Held-Karp is capped at n <= {MAX_CYCLE_NODES} nodes, got {self.n}")

    @property
    def ambient_dim(self) -> int:
        return num_edges(self.n)

    @property
    def diameter_exact(self) -> float:
        # two 0/1 incidence vectors with n ones each differ in at most 2n places
        return math.sqrt(2.0 * self.n)

    def minimize(self, g: Point) -> tuple[Point, float]:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.ambient_dim,):
            raise ValueError(f"expected {self.ambient_dim} edge costs")
        tour, _ = held_karp(cost_matrix(g, self.n))
        vertex = tour_to_incidence(tour, self.n)
        return vertex, float(g @ vertex)

    def contains(self, p: Point, tol: float = ABS_TOL) -> bool:
        return is_cycle_vertex(p, self.n, tol)


# --- brute-force counterparts ----------------------------------------------------


def brute_force_tour(C: np.ndarray) -> tuple[list[int], float]:
    n = C.shape[0]
    best, best_tour = np.inf, None
    for perm in itertools.permutations(range(1, n)):
        tour = (0,) + perm
        cost = sum(C[a, b] for a, b in zip(tour, tour[1:] + tour[:1]))
        if cost < best:
            best, best_tour = cost, list(tour)
    return best_tour, float(best)


def brute_force_cycle_vertices(n: int):
    """Incidence vectors of all (n-1)!/2 distinct Hamiltonian cycles."""
    for perm in itertools.permutations(range(1, n)):
        if perm[0] < perm[-1]:
            yield tour_to_incidence([0, *perm], n)


def dense_spectrahedron_min(g: Point, n: int) -> float:
    """min over the spectrahedron of <G, X> via a dense symmetric eigensolve."""
    return float(np.linalg.eigvalsh(sym_from_flat(g, n))[0])


def make_lmo(family: str, n: int, **kwargs):
    family = family.lower()
    if family in ("simplex", "segment"):
        return SimplexLmo(n)
    if family == "spectrahedron":
        return SpectrahedronLmo(n, **kwargs)
    if family == "hamiltonian":
        return HamiltonianLmo(n)
    raise ValueError(f"unknown feasible set family {family!r}")
