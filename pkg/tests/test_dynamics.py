import numpy as np
import pytest

from cavity_mf import (EffectiveParams, IntegrationError, MFState, integrate,
                       rhs_1d, spin_norm)
from cavity_mf.dynamics import write_bloch_csv, write_trajectory_csv

from conftest import random_params, random_state_on_sphere


def test_rhs_empty_cavity_is_fixed():
    p = EffectiveParams(delta_at=0.3, delta_ph=0.7, lam=0.2, g_tilde=1.1, kappa=0.5)
    for w0 in (-1.0, 0.3, 1.0):
        assert np.all(rhs_1d([0, 0, 0, 0, w0], p) == 0.0)


def test_rhs_pump_only():
    p = EffectiveParams(eta_r=1.0, n_spins=1.0)
    d = rhs_1d([0, 0, 0, 0, 1.0], p)
    assert d[0] == 0.0
    assert d[1] == -1.0
    assert np.all(d[2:] == 0.0)


def test_rhs_frozen_symbolic_value(fig3_params):
    # Frozen from an independent symbolic substitution into the five real
    # equations of motion: state (1,0,1,0,0) at the bistability base point
    # with g_tilde = 1 gives (-1/2, -2, 0, 0, 0).
    p = fig3_params.replace(g_tilde=1.0)
    d = rhs_1d([1.0, 0.0, 1.0, 0.0, 0.0], p)
    assert np.allclose(d, [-0.5, -2.0, 0.0, 0.0, 0.0], rtol=0, atol=1e-15)


def test_rhs_accepts_mfstate_and_broadcasts(fig3_params):
    p = fig3_params.replace(g_tilde=1.0)
    single = rhs_1d(MFState(1.0, 0.0, 1.0, 0.0, 0.0), p)
    batch = rhs_1d(np.tile([1.0, 0.0, 1.0, 0.0, 0.0], (7, 1)), p)
    assert batch.shape == (7, 5)
    assert np.all(batch == single)


def test_spin_norm_values():
    n = 2.5
    assert spin_norm([0, 0, n, 0, 0]) == n**2
    assert spin_norm([0, 0, 0, 0, -n]) == n**2
    assert spin_norm([1, 1, 1, 1, 1]) == 3.0  # alpha does not contribute


def test_rhs_conserves_spin_norm_gamma0():
    # S . dS/dt vanishes identically for gamma = 0 (checked here to
    # floating rounding over 10^4 random states and parameters).
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        states = np.stack([random_state_on_sphere(rng, p.n_spins) for _ in range(100)])
        d = rhs_1d(states, p)
        dot = (states[:, 2:] * d[:, 2:]).sum(axis=1)
        scale = np.linalg.norm(states[:, 2:], axis=1) * np.linalg.norm(d[:, 2:], axis=1) + 1.0
        worst = max(worst, float(np.max(np.abs(dot) / scale)))
    assert worst <= 1e-12


def test_gamma_breaks_conservation():
    p = EffectiveParams(g_tilde=1.0, gamma=0.4, eta_r=1.0, n_spins=1.0)
    y = [0.1, 0.0, 0.6, 0.0, 0.5]  # w != -N so the decay term acts
    d = rhs_1d(y, p)
    dot = y[2] * d[2] + y[3] * d[3] + y[4] * d[4]
    assert abs(dot) > 1e-3


def test_gamma_decay_targets_dark_state():
    p = EffectiveParams(gamma=0.5, n_spins=2.0)
    d = rhs_1d([0, 0, 0.2, 0.1, 0.3], p)
    assert d[2] == -0.25 * 0.2
    assert d[3] == -0.25 * 0.1
    assert d[4] == -0.5 * (0.3 + 2.0)
    assert np.all(rhs_1d([0, 0, 0, 0, -2.0], p) == 0.0)


# ---------------------------------------------------------------------------
# Integration


def test_integrate_relaxes_to_dark_state():
    p = EffectiveParams(delta_at=-0.2, delta_ph=0.3, lam=0.1, g_tilde=1.0,
                        kappa=0.5, n_spins=1.0)
    traj = integrate([0.1, 0.0, 0.6, 0.0, 0.8], p, t_end=400.0)
    final = traj.final_state
    assert abs(final[0]) < 1e-6 and abs(final[1]) < 1e-6
    assert abs(final[2]) < 1e-6 and abs(final[3]) < 1e-6
    assert abs(abs(final[4]) - 1.0) < 1e-6
    assert traj.settled


def test_integrate_converges_to_stable_branch(fig3_params):
    # Region III: the unique attractor is the empty-cavity branch with
    # w < 0; the steady-state module supplies the oracle value.
    from cavity_mf import trivial_branch

    p = fig3_params.replace(g_tilde=3.0)
    target = [b for b in trivial_branch(p) if b.w < 0][0].state
    rng = np.random.default_rng(4)
    y0 = random_state_on_sphere(rng, 1.0)
    # This seed lingers near the unstable empty-cavity partner first, so
    # the horizon is generous.
    traj = integrate(y0, p, t_end=2000.0)
    assert np.max(np.abs(traj.final_state - target)) < 1e-5
    assert traj.settled


def test_integrate_point_a_does_not_settle(fig3_params):
    # lam/eta = 1.3 at g N/(2 eta) = 0.75: no attracting fixed point,
    # sustained oscillation in w.
    p = fig3_params.replace(lam=1.3, g_tilde=1.5)
    traj = integrate([0.1, 0.0, 0.3, 0.2, np.sqrt(1 - 0.09 - 0.04)], p, t_end=400.0)
    assert not traj.settled
    tail_w = traj.states[traj.times > 350.0, 4]
    assert tail_w.max() - tail_w.min() > 0.5


def test_integrate_conservation_drift(fig3_params):
    p = fig3_params.replace(g_tilde=1.7, lam=0.4)
    rng = np.random.default_rng(2)
    traj = integrate(random_state_on_sphere(rng, 1.0), p, t_end=100.0)
    assert traj.conservation_drift is not None
    assert traj.conservation_drift < 1e-8


def test_integrate_validates_arguments(fig3_params):
    with pytest.raises(ValueError):
        integrate([0, 0, 0, 0, 1], fig3_params, t_end=0.0)
    with pytest.raises(ValueError):
        integrate([0, 0, 0, 0, 1], fig3_params, t_end=1.0, rel_tol=-1e-9)


def test_integrate_dense_sampling(fig3_params):
    traj = integrate([0, 0, 0.6, 0, 0.8], fig3_params.replace(g_tilde=1.0), t_end=10.0)
    assert len(traj.times) >= 512
    assert np.all(np.diff(traj.times) > 0)
    assert traj.states.shape == (len(traj.times), 5)


def test_integrator_self_convergence(fig3_params):
    # Endpoint error must shrink with the tolerance (adaptive embedded
    # scheme); three decades of tolerance buy at least two of accuracy.
    p = fig3_params.replace(g_tilde=1.3, lam=0.7)
    y0 = np.array([0.05, -0.02, 0.3, -0.4, np.sqrt(1 - 0.25)])
    ref = integrate(y0, p, t_end=50.0, rel_tol=1e-13, abs_tol=1e-15).final_state
    errs = [np.max(np.abs(integrate(y0, p, t_end=50.0, rel_tol=rt, abs_tol=rt * 1e-2
                                    ).final_state - ref))
            for rt in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[2] > 1e2


def test_trajectory_csv_export(tmp_path, fig3_params):
    p = fig3_params.replace(g_tilde=1.0)
    traj = integrate([0, 0, 0.6, 0, 0.8], p, t_end=5.0)
    out = tmp_path / "traj.csv"
    write_trajectory_csv(traj, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,alpha_r,alpha_i,s_x,s_y,w"
    assert len(lines) == len(traj.times) + 1

    bloch = tmp_path / "bloch.csv"
    write_bloch_csv(traj, bloch, p.n_spins)
    head = bloch.read_text().splitlines()
    assert head[0] == "t,s_x,s_y,w"
    first = np.array(head[1].split(","), dtype=float)
    assert first[1:].tolist() == [0.6, 0.0, 0.8]
