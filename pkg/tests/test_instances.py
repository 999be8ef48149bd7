import numpy as np
import pytest
import scipy.sparse as sp

from fw_sliding.instances import (
    Family,
    InstanceSpec,
    QuadraticObjective,
    component_rng,
    estimate_lmin,
    gen_hamiltonian,
    gen_simplex,
    gen_spectrahedron,
    generate,
    random_tour,
)
from fw_sliding.oracles import HamiltonianLmo, SimplexLmo, SpectrahedronLmo, is_cycle_vertex, sym_from_flat, tour_to_incidence


def central_difference(f, x, h=1e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_spectrahedron_planted(rng):
    obj, X = gen_spectrahedron(50, 6, 0.4, 3)
    assert obj.value(X) <= 1e-18 * max(1.0, float(obj.rhs @ obj.rhs))
    M = sym_from_flat(X, 6)
    assert np.trace(M) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(M)[0] >= -1e-12
    assert sp.issparse(obj.op)
    nnz = obj.op.nnz / (50 * 36)
    assert 0.25 < nnz < 0.55


def test_hamiltonian_planted():
    obj, x = gen_hamiltonian(40, 7, 0.6, 1)
    assert obj.value(x) == pytest.approx(0.0, abs=1e-20)
    assert set(np.round(x, 12)) <= {0.0, 0.2, 0.8, 1.0}
    assert obj.op.min() >= 0 and obj.op.max() < 1
    rng = component_rng(1, 2)  # planted-solution stream
    v1 = tour_to_incidence(random_tour(rng, 7), 7)
    v2 = tour_to_incidence(random_tour(rng, 7), 7)
    assert is_cycle_vertex(v1, 7) and is_cycle_vertex(v2, 7)
    np.testing.assert_allclose(x, 0.8 * v1 + 0.2 * v2)


def test_hamiltonian_size_checked():
    with pytest.raises(ValueError):
        gen_hamiltonian(10, 2, 0.5, 0)


def test_simplex_planted():
    obj, x = gen_simplex(20, 8, 2)
    assert obj.value(x) == pytest.approx(0.0, abs=1e-25)
    assert x.sum() == pytest.approx(1.0) and np.all(x >= 0)


@pytest.mark.parametrize("spec", [
    InstanceSpec(Family.SPECTRAHEDRON, 30, 4, 0.5, 9),
    InstanceSpec(Family.HAMILTONIAN, 30, 5, 0.5, 9),
    InstanceSpec(Family.SIMPLEX, 30, 5, 1.0, 9),
])
def test_generation_is_deterministic(spec):
    (a, pa), (b, pb) = generate(spec), generate(spec)
    np.testing.assert_array_equal(pa, pb)
    np.testing.assert_array_equal(a.rhs, b.rhs)
    A = a.op.toarray() if sp.issparse(a.op) else a.op
    B = b.op.toarray() if sp.issparse(b.op) else b.op
    np.testing.assert_array_equal(A, B)


def test_seeds_differ():
    assert not np.array_equal(gen_simplex(5, 5, 0)[1], gen_simplex(5, 5, 1)[1])


def test_component_streams_are_independent():
    a = component_rng(7, 0).random(4)
    b = component_rng(7, 1).random(4)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, component_rng(7, 0).random(4))


@pytest.mark.parametrize("spec,lmo", [
    (InstanceSpec(Family.SPECTRAHEDRON, 20, 4, 0.5, 1), SpectrahedronLmo(4)),
    (InstanceSpec(Family.HAMILTONIAN, 20, 5, 0.6, 1), HamiltonianLmo(5)),
    (InstanceSpec(Family.SIMPLEX, 20, 6, 1.0, 1), SimplexLmo(6)),
])
def test_gradient_matches_finite_differences(spec, lmo, rng):
    obj, _ = generate(spec)
    for _ in range(20):
        x = rng.standard_normal(lmo.ambient_dim)
        fd = central_difference(obj.value, x)
        g = obj.gradient(x)
        assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))


def test_lmin_examples():
    assert estimate_lmin(QuadraticObjective(np.diag([1.0, 2.0]), np.zeros(2))) == pytest.approx(4.0, rel=1e-8)
    assert estimate_lmin(QuadraticObjective(np.array([[0.0, 1.0], [1.0, 0.0]]), np.zeros(2))) == pytest.approx(1.0, rel=1e-8)


def test_lmin_against_dense_eigensolve(rng):
    A = rng.standard_normal((20, 30))
    lam = np.linalg.eigvalsh(A.T @ A)[-1]
    assert estimate_lmin(QuadraticObjective(A, np.zeros(20))) == pytest.approx(lam, rel=1e-6)
    S = sp.random(40, 25, density=0.3, random_state=1, format="csr")
    lam = np.linalg.eigvalsh((S.T @ S).toarray())[-1]
    assert estimate_lmin(QuadraticObjective(S, np.zeros(40))) == pytest.approx(lam, rel=1e-6)


def test_smoothness_witness(rng):
    obj, _ = gen_spectrahedron(30, 4, 0.5, 2)
    L = estimate_lmin(obj)
    for _ in range(100):
        x, y = rng.standard_normal(16), rng.standard_normal(16)
        assert np.linalg.norm(obj.gradient(x) - obj.gradient(y)) <= L * np.linalg.norm(x - y) * (1 + 1e-6)


def test_instance_spec_validation():
    with pytest.raises(ValueError):
        InstanceSpec("SIMPLEX", 0, 3)
    with pytest.raises(ValueError):
        InstanceSpec("SIMPLEX", 3, 3, density=0.0)
    with pytest.raises(ValueError):
        InstanceSpec("BALL", 3, 3)
    assert InstanceSpec("SEGMENT", 2, 2).optimal_value == 0.25
    assert InstanceSpec("SIMPLEX", 2, 2).to_json() == {"family": "SIMPLEX", "m": 2, "n": 2, "density": 1.0, "seed": 0}
