"""Oracle-equivalence checks against brute force, and the segment demo."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..baselines import BaselineConfig, cg_run
from ..instances import component_rng, gen_segment
from ..oracles import (
    HamiltonianLmo,
    SimplexLmo,
    SpectrahedronLmo,
    brute_force_tour,
    cost_matrix,
    dense_spectrahedron_min,
    num_edges,
)

EQUIV_TOL = 1e-8
MIN_SIZE = {"simplex": 1, "spectrahedron": 1, "hamiltonian": 3}
MAX_SIZE = {"simplex": 64, "spectrahedron": 8, "hamiltonian": 9}


@dataclass
class Mismatch:
    family: str
    size: int
    trial: int
    g: list
    got: float
    expected: float

    def __str__(self):
        return (f"{self.family} n={self.size} trial={self.trial}: LMO value {self.got!r} "
                f"!= brute force {self.expected!r}; g={self.g}")


def _simplex_trial(n, rng):
    g = rng.standard_normal(n)
    if rng.random() < 0.2:
        g = np.round(g)  # exercise ties
    lmo = SimplexLmo(n)
    v, val = lmo.minimize(g)
    expected = min(float(g @ e) for e in lmo.vertices())
    ok = abs(val - expected) <= EQUIV_TOL and lmo.contains(v) and abs(float(g @ v) - val) <= EQUIV_TOL
    return g, val, expected, ok


def _spectrahedron_trial(n, rng):
    M = rng.standard_normal((n, n))
    g = (0.5 * (M + M.T)).ravel()
    lmo = SpectrahedronLmo(n)
    v, val = lmo.minimize(g)
    expected = dense_spectrahedron_min(g, n)
    ok = abs(val - expected) <= EQUIV_TOL and lmo.contains(v)
    return g, val, expected, ok


def _hamiltonian_trial(n, rng):
    g = rng.random(num_edges(n))
    lmo = HamiltonianLmo(n)
    v, val = lmo.minimize(g)
    _, expected = brute_force_tour(cost_matrix(g, n))
    ok = abs(val - expected) <= EQUIV_TOL and lmo.contains(v)
    return g, val, expected, ok


_TRIALS = {"simplex": _simplex_trial, "spectrahedron": _spectrahedron_trial,
           "hamiltonian": _hamiltonian_trial}


def lmo_equivalence(family: str, size: int, trials: int, seed: int) -> list[Mismatch]:
    """Compare the LMO against brute force on ``trials`` random objectives for
    every size from the family's smallest up to ``size``."""
    family = family.lower()
    if family not in _TRIALS:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(_TRIALS)}")
    if not MIN_SIZE[family] <= size <= MAX_SIZE[family]:
        raise ValueError(f"{family} brute force supports sizes {MIN_SIZE[family]}..{MAX_SIZE[family]}")
    bad = []
    for n in range(MIN_SIZE[family], size + 1):
        rng = component_rng(seed, n)
        for t in range(trials):
            g, got, expected, ok = _TRIALS[family](n, rng)
            if not ok:
                bad.append(Mismatch(family, n, t, g.tolist(), got, expected))
    return bad


class RecordingLmo:
    """Wraps an LMO and keeps every vertex it returns."""

    def __init__(self, lmo):
        self.lmo = lmo
        self.vertices = []
        self.ambient_dim = lmo.ambient_dim
        self.diameter_exact = lmo.diameter_exact
        self.set_id = lmo.set_id

    def minimize(self, g):
        v, val = self.lmo.minimize(g)
        self.vertices.append(v)
        return v, val

    def contains(self, p, tol=1e-9):
        return self.lmo.contains(p, tol)


def segment_trajectory(iters: int = 3):
    """CG on 0.5 ||x||^2 over the segment from (0, 1); returns (iterates, vertices)."""
    obj, _ = gen_segment()
    lmo = RecordingLmo(SimplexLmo(2))
    ys = []
    cg_run(obj, lmo, BaselineConfig(epsilon=1e-300, max_iters=iters), y0=np.array([0.0, 1.0]),
           callback=lambda k, y: ys.append(y.copy()))
    return ys, lmo.vertices[:iters]
