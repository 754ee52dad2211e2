import numpy as np
import pytest

from torus_bohm.dynamics import NODE_STOPPED, TrajectoryConfig
from torus_bohm.geometry import SurfaceKind, scale_factor_G
from torus_bohm.monodromy import (
    MonodromyState,
    build_J,
    integrated_trace,
    lyapunov,
    lyapunov_row,
    propagate,
    table_sweep,
)
from torus_bohm.wavefield import SHessian, Superposition, density, evaluate_jet, hessian_S

from conftest import flat_analog


def weighted_density(sp, theta, phi, t):
    w = scale_factor_G(sp.shape, theta) if sp.kind is SurfaceKind.TORUS else 1.0
    return density(sp, theta, phi, t) * w


@pytest.mark.parametrize("theta0", [0.0, np.pi / 3, np.pi, 5 * np.pi / 3])
def test_shared_m_monodromy_is_density_ratio(table2_torus, theta0):
    """For one common m, M = diag(M11, 1) and M11 = rho~(start) / rho~(now) with rho~ = |Psi|^2 G."""
    cfg = TrajectoryConfig(table2_torus, theta0, t_end=10.0, rel_tol=1e-12, abs_tol=1e-12, sample_dt=1.0)
    rec, states = propagate(cfg, (3.0, 9.0, 10.0))
    for s in states:
        theta, phi = rec.position(s.t)
        ratio = weighted_density(table2_torus, theta0, 0.0, 0.0) / weighted_density(table2_torus, theta, phi, s.t)
        assert s.matrix[0, 0] == pytest.approx(ratio, rel=1e-7)
        assert s.matrix[1, 1] == 1.0
        assert s.matrix[0, 1] == 0.0 and s.matrix[1, 0] == 0.0


@pytest.mark.parametrize("fixture", ["table2_torus", "table3_torus", "fig1", "fig2"])
def test_abel_liouville(request, fixture):
    sp = request.getfixturevalue(fixture)
    theta0 = 1.05 * np.pi if fixture == "fig2" else 0.4
    rec, states = propagate(TrajectoryConfig(sp, theta0, t_end=10.0, sample_dt=0.05), (5.0, 10.0))
    for s in states:
        expected = integrated_trace(rec, sp, s.t)
        assert np.exp(s.log_det()) == pytest.approx(np.exp(expected), rel=1e-6)


def test_single_state_identity(states):
    sp = Superposition(((states[("-", 3, 2)], 1.0),))
    _, ms = propagate(TrajectoryConfig(sp, 1.1, t_end=100.0, sample_dt=1.0), (9.0, 10.0, 100.0))
    for s in ms:
        assert np.max(np.abs(s.matrix - np.eye(2))) < 1e-8
    est = lyapunov(ms, 9.0, 10.0)
    assert est.at_t1 == 0.0 and est.at_t2 == 0.0 and est.value == 0.0


def test_build_J_scaling(shape):
    hess = SHessian(2.0, 3.0, 4.0)
    theta = 0.8
    J = build_J(hess, "torus", shape, theta)
    G = scale_factor_G(shape, theta)
    assert J.j_11 == pytest.approx(2.0 / shape.a**2)
    assert J.j_12 == pytest.approx(3.0 / (shape.a * shape.R * G))
    assert J.j_21 == J.j_12
    assert J.j_22 == pytest.approx(4.0 / (shape.R * G) ** 2)
    Jf = build_J(hess, "flat", shape, theta)
    assert Jf.j_22 == pytest.approx(4.0 / shape.R**2)
    assert J.trace == pytest.approx(J.j_11 + J.j_22)


def test_kernel_J_matches_library(fig2):
    from torus_bohm import _kernels

    rng = np.random.default_rng(5)
    for th, ph, t in rng.uniform(0, 6, size=(20, 3)):
        vt, vp, j11, j12, j22 = _kernels.stability_matrix(th, ph, t, fig2.packed)
        J = build_J(hessian_S(evaluate_jet(fig2, th, ph, t)), fig2.kind, fig2.shape, th)
        assert (j11, j12, j22) == pytest.approx((J.j_11, J.j_12, J.j_22), rel=1e-12, abs=1e-12)


def test_windowing_identity(table2_torus, fig2):
    for sp, theta0 in [(table2_torus, np.pi), (table2_torus, 5 * np.pi / 6), (fig2, 1.05 * np.pi)]:
        _, states = propagate(TrajectoryConfig(sp, theta0, t_end=10.0, sample_dt=1.0), (9.0, 10.0))
        est = lyapunov(states, 9.0, 10.0)
        implied = (10.0 * est.lambda_t2 - 9.0 * est.lambda_t1) / 1.0
        np.testing.assert_allclose(est.lambda_window, implied, rtol=0, atol=1e-12)


def test_overflow_rescaling(fig2):
    cfg = TrajectoryConfig(fig2, 1.05 * np.pi, t_end=10.0, sample_dt=1.0)
    _, plain = propagate(cfg, (9.0, 10.0))
    _, scaled = propagate(cfg, (9.0, 10.0), overflow_limit=1.5)
    assert any(s.log_scale > 0 for s in scaled)
    for a, b in zip(plain, scaled):
        np.testing.assert_allclose(a.eigen()[0], b.eigen()[0], atol=1e-7)
        assert a.log_det() == pytest.approx(b.log_det(), abs=1e-7)


def test_crossing_detected():
    s1 = MonodromyState(9.0, np.diag([np.exp(2.0), np.exp(1.0)]))
    s2 = MonodromyState(10.0, np.diag([np.exp(1.5), np.exp(3.0)]))
    est = lyapunov([s1, s2], 9.0, 10.0)
    assert est.crossed
    np.testing.assert_allclose(est.lambda_window, [1.0, 0.5])
    np.testing.assert_allclose(est.crossed_window, [-0.5, 2.0])
    assert est.value == pytest.approx(2.0)
    plain = lyapunov([s1, MonodromyState(10.0, np.diag([np.exp(3.0), np.exp(1.5)]))], 9.0, 10.0)
    assert not plain.crossed and plain.value == pytest.approx(1.0)


def test_lyapunov_validation():
    s = MonodromyState(9.0, np.eye(2))
    with pytest.raises(ValueError):
        lyapunov([s], 10.0, 9.0)
    with pytest.raises(ValueError):
        lyapunov([s], 9.0, 10.0)
    with pytest.raises(ValueError):
        MonodromyState(1.0, np.zeros((2, 2))).eigen()


def test_log_scale_is_carried():
    s = MonodromyState(1.0, np.diag([2.0, 0.5]), log_scale=10.0)
    logs, _ = s.eigen()
    np.testing.assert_allclose(logs, [10.0 + np.log(2.0), 10.0 + np.log(0.5)])
    assert s.log_det() == pytest.approx(20.0)


def test_node_start_flags_row(states):
    sp = Superposition(((flat_analog(states[("-", 1, 0)]), 1.0),))
    row = lyapunov_row(sp, 0.0)
    assert row.status == NODE_STOPPED and not row.ok
    assert np.isnan(row.lambda_t2)


def test_sweep_order_independent_of_jobs(table3_torus):
    grid = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    serial = table_sweep(table3_torus, grid, jobs=1)
    parallel = table_sweep(table3_torus, grid, jobs=4)
    assert [r.theta0 for r in parallel] == grid
    for a, b in zip(serial, parallel):
        assert (a.lambda_t1, a.lambda_t2, a.lambda_window) == (b.lambda_t1, b.lambda_t2, b.lambda_window)


def test_empty_sweep(table3_torus):
    with pytest.raises(ValueError, match="no theta0 points"):
        table_sweep(table3_torus, [])


def test_checkpoint_range(table3_torus):
    with pytest.raises(ValueError):
        propagate(TrajectoryConfig(table3_torus, 0.0, t_end=5.0), (9.0, 10.0))
