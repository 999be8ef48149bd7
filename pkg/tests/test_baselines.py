import numpy as np
import pytest

from fw_sliding.baselines import BaselineConfig, cg_run, cgs_run, default_fixed_n
from fw_sliding.cgsls import inner_call_bound
from fw_sliding.core import Termination
from fw_sliding.instances import estimate_lmin, gen_segment, gen_simplex, gen_spectrahedron
from fw_sliding.oracles import SimplexLmo, SpectrahedronLmo


def averaged_iterates(vertices, y0):
    """y_k as the weighted average sum_i 2i/(k(k+1)) x_i (y0 drops out for k >= 1)."""
    out = [np.asarray(y0, float)]
    for k in range(1, len(vertices) + 1):
        w = np.array([2 * i / (k * (k + 1)) for i in range(1, k + 1)])
        out.append(w @ np.array(vertices[:k]))
    return out


def test_segment_trajectory():
    obj, _ = gen_segment()
    ys, xs = [], []

    class Rec(SimplexLmo):
        def minimize(self, g):
            v, val = super().minimize(g)
            xs.append(v)
            return v, val

    cg_run(obj, Rec(2), BaselineConfig(epsilon=1e-300, max_iters=3), y0=np.array([0.0, 1.0]),
           callback=lambda k, y: ys.append(y))
    np.testing.assert_array_equal(xs[0], [1.0, 0.0])
    np.testing.assert_array_equal(np.array(xs[:3]), [[1, 0], [0, 1], [1, 0]])
    np.testing.assert_allclose(ys[2], [1 / 3, 2 / 3], atol=1e-12)
    np.testing.assert_allclose(ys[3], [2 / 3, 1 / 3], atol=1e-12)
    for a, b in zip(ys, averaged_iterates(xs[:3], [0.0, 1.0])):
        np.testing.assert_allclose(a, b, atol=1e-15)


def test_cg_optimal_start_stops_immediately():
    obj, _ = gen_segment()
    res = cg_run(obj, SimplexLmo(2), BaselineConfig(epsilon=1e-9), y0=np.array([0.5, 0.5]))
    assert res.termination is Termination.CERTIFIED
    assert res.outer_iters == 1
    assert res.wolfe_gap_final == 0.0
    assert res.trace[0].wolfe_gap == 0.0


def test_cg_rate_envelope():
    obj, _ = gen_simplex(30, 10, 4)
    l_min = estimate_lmin(obj)
    lmo = SimplexLmo(10)
    res = cg_run(obj, lmo, BaselineConfig(epsilon=1e-300, max_iters=300))
    for rec in res.trace[1:]:
        assert rec.f_y <= 4 * 2 * l_min * 2 / (rec.k + 1)
        assert rec.wolfe_gap is None or rec.wolfe_gap >= -1e-9
    assert res.termination is Termination.MAX_OUTER


def test_cg_wolfe_gap_terminates():
    obj, _ = gen_simplex(30, 10, 5)
    res = cg_run(obj, SimplexLmo(10), BaselineConfig(epsilon=1e-3))
    assert res.termination is Termination.CERTIFIED
    assert res.wolfe_gap_final <= 1e-3
    assert res.f_final <= 1e-3
    assert [r.k for r in res.trace] == list(range(len(res.trace)))


def test_cgs_parameters_and_bounds():
    obj, _ = gen_spectrahedron(40, 5, 0.5, 2)
    lmo = SpectrahedronLmo(5)
    l_min = estimate_lmin(obj)
    cfg = BaselineConfig(epsilon=1e-2, lipschitz=l_min)
    res = cgs_run(obj, lmo, cfg)
    assert res.termination is Termination.CERTIFIED
    assert res.f_final <= 1e-2
    assert res.total_backtracks == 0
    for r in res.trace:
        assert r.gamma == 2.0 / (r.k + 1)
        assert r.big_gamma == pytest.approx(2.0 / (r.k * (r.k + 1)), rel=1e-15)
        assert r.l_k == l_min
    g = np.array([r.gamma for r in res.trace])
    big = np.array([r.big_gamma for r in res.trace])
    np.testing.assert_allclose(big[1:], big[:-1] * (1 - g[1:]), rtol=1e-12)
    n = default_fixed_n(l_min, lmo.diameter_exact, 1e-2)
    assert res.inner_lmo <= 6 * n * n + n
    for _, beta, eta, t in res.inner_calls:
        assert t <= inner_call_bound(beta, eta, lmo.diameter_exact) + 1


def test_cgs_segment():
    obj, _ = gen_segment()
    res = cgs_run(obj, SimplexLmo(2), BaselineConfig(epsilon=1e-6, fixed_n=5000))
    assert res.termination is Termination.CERTIFIED
    assert res.wolfe_gap_final <= 1e-6
    assert res.f_final - 0.25 <= 1e-6
    assert res.cert_check_lmo == res.outer_iters


def test_cgs_needs_lipschitz():
    obj, _ = gen_simplex(5, 3, 0)
    with pytest.raises(ValueError, match="Lipschitz"):
        cgs_run(obj, SimplexLmo(3), BaselineConfig(epsilon=1e-3))


@pytest.mark.parametrize("kw", [{"epsilon": 0}, {"epsilon": 1e-3, "lipschitz": -1.0},
                                {"epsilon": 1e-3, "max_iters": 0}])
def test_baseline_config_validation(kw):
    with pytest.raises(ValueError):
        BaselineConfig(**kw)
