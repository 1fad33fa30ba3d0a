import math

import numpy as np
import pytest

egaa = pytest.importorskip("egaa")


def test_quadratic_oracle():
    p = egaa.make_quadratic(3, 3.0)
    assert p.dimension == 3
    assert p.metadata["lipschitz_L"] == 3.0
    x = np.ones(3)
    assert p.value(x) == pytest.approx(3.0)  # 1/2 (1 + 2 + 3)
    np.testing.assert_allclose(p.gradient(x), [1.0, 2.0, 3.0])


def test_transform_round_trip():
    rng = np.random.default_rng(0)
    for m in range(1, 6):
        theta = rng.standard_normal(m)
        back = egaa.gamma_to_theta(egaa.theta_to_gamma(theta))
        np.testing.assert_allclose(back, theta, atol=1e-14)


def test_worked_transform_case():
    gamma = egaa.theta_to_gamma(np.array([0.2, 0.1, -0.3]))
    np.testing.assert_allclose(gamma, [0.4, 0.1, -0.2], atol=1e-14)
    assert egaa.effective_mass(np.array([0.0, 0.5])) == pytest.approx(1.5)


def test_solve_type2_single_column():
    rng = np.random.default_rng(1)
    r = rng.standard_normal(6)
    theta, _ = egaa.solve_type2(r, r.reshape(-1, 1), 0.0)
    assert theta[0] == pytest.approx(1.0)


def test_energy_guard_branches():
    assert egaa.energy_guard(7.0, 1.0, 5.0) == pytest.approx(5.0 / 6.0)
    assert egaa.energy_guard(1.5, 1.0, 5.0) == 1.0
    assert egaa.energy_guard(-0.5, 1.0, 5.0) == pytest.approx(0.5)


def test_guarded_run_converges():
    p = egaa.make_quadratic(50, 100.0)
    rng = np.random.default_rng(3)
    x0 = rng.standard_normal(50)
    out = egaa.run(p, x0, method="egaa", beta=1.8 / 100.0, depth_m=3,
                   delta_max=5.0, eta=0.1, max_iters=2000, grad_tol=1e-8)
    assert out["status"] == "converged"
    assert out["grad_norm"][-1] <= 1e-8
    masses = out["M_eff"]
    diffs = np.diff(np.concatenate([[1.0], masses]))
    assert np.all(diffs <= 5.0 + 1e-12)
    assert np.all(masses >= 1e-3 - 1e-15)


def test_run_matches_raw_anderson():
    p = egaa.make_logistic(200, 30, 1e-3, 7)
    beta = 1.0 / p.metadata["lipschitz_L"]
    x0 = np.zeros(30)
    a = egaa.run(p, x0, method="aa2", beta=beta, depth_m=1, max_iters=50,
                 grad_tol=0.0, keep_iterates=True)
    b = egaa.run(p, x0, method="egaa", beta=beta, depth_m=1, delta_max=1e12,
                 eta=1e-12, max_iters=50, grad_tol=0.0, keep_iterates=True)
    dev = max(np.linalg.norm(u - v) for u, v in zip(a["iterates"], b["iterates"]))
    assert dev <= 1e-8


def test_avd_trajectory():
    p = egaa.make_quadratic(1, 1.0)
    traj = egaa.integrate_avd(p, np.ones(1), t0=0.1, T=10.0, dt=1e-3)
    t = traj["t"]
    assert np.all(np.diff(t) > 0)
    assert traj["energy_E"][-1] < traj["energy_E"][0]


def test_ishd_dissipates():
    p = egaa.make_quadratic(2, 10.0)
    traj = egaa.integrate_ishd(p, np.array([1.0, -0.5]), np.zeros(2), t0=0.0,
                               T=5.0, dt=1e-3, mass=1.0, damping=0.0,
                               geom_beta=1.0, sqrt_h=0.1)
    e = traj["energy_E"]
    assert np.all(np.diff(e) <= 1e-8)


def test_nnls_projector():
    p = egaa.make_nnls(samples_M=40, features_n=10, seed=3, sparsity_p=0.2)
    assert p.has_projector
    x = np.array([-1.0, 2.0] + [0.0] * 8)
    px = p.projector(x)
    assert px[0] == 0.0 and px[1] == 2.0
