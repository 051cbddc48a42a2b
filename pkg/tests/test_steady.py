import math

import numpy as np
import pytest

from cavity_mf import (EffectiveParams, NewtonError, lambda_poly_branch, newton_refine,
                       quartic_w_branch, rhs_1d, solve_branches, spin_norm,
                       theta_branch, transition_points, trivial_branch)
from cavity_mf.steady import (SweepResult, continuation_sweep, g2_star_numeric,
                              quartic_root_count, region_r_interval, residual_of,
                              write_sweep_csv)

from conftest import random_params, random_state_on_sphere


def sin_theta(branch):
    # theta parametrization: s_x = N cos(t), s_y = -N sin(t) at w = 0
    n = math.hypot(branch.state[2], branch.state[3])
    return -branch.state[3] / n


# ---------------------------------------------------------------------------
# Empty-cavity branch


def test_trivial_branch_derived_point():
    # eta_r = 1, N = 2, g = 2: s_x = -1, w = +-sqrt(3); residual checked
    # against the dynamics RHS, not the solving algebra.
    p = EffectiveParams(delta_ph=0.3, kappa=0.4, eta_r=1.0, n_spins=2.0, g_tilde=2.0)
    branches = trivial_branch(p)
    assert len(branches) == 2
    for b in branches:
        assert b.state[0] == 0.0 and b.state[1] == 0.0
        assert b.state[2] == -1.0 and b.state[3] == 0.0
        assert abs(abs(b.w) - math.sqrt(3.0)) < 1e-15
        assert np.max(np.abs(rhs_1d(b.state, p))) < 1e-12
    assert branches[0].w > 0 > branches[1].w


def test_trivial_branch_coincides_at_transition(fig3_params):
    p = fig3_params.replace(g_tilde=2.0)  # exactly g1* = 2 eta/N
    ws = [b.w for b in trivial_branch(p)]
    assert ws and all(w == 0.0 for w in ws)


def test_trivial_branch_large_coupling_limit(fig3_params):
    p = fig3_params.replace(g_tilde=1e6)
    ws = sorted(b.w for b in trivial_branch(p))
    assert abs(ws[0] + 1.0) < 1e-9 and abs(ws[1] - 1.0) < 1e-9
    assert all(abs(b.state[2]) < 1e-5 for b in trivial_branch(p))


def test_trivial_branch_empty_below_g1(fig3_params):
    assert trivial_branch(fig3_params.replace(g_tilde=1.9)) == []
    assert trivial_branch(fig3_params.replace(g_tilde=0.0)) == []


def test_trivial_branch_requires_delta_at_zero(fig3_params):
    with pytest.raises(ValueError):
        trivial_branch(fig3_params.replace(delta_at=0.5, g_tilde=3.0))


def test_trivial_branch_valid_for_nonzero_lambda(fig3_params):
    # alpha = 0 kills every nonlinear term, so the branch survives lam != 0.
    p = fig3_params.replace(g_tilde=2.5, lam=1.3)
    for b in trivial_branch(p):
        assert residual_of(b.state, p) < 1e-12


# ---------------------------------------------------------------------------
# w = 0 branch


def test_theta_branch_signs_across_g1(fig3_params):
    # Below g1* one angle solution is negative (sin < 0); above, both are
    # positive. (Graphical structure of the angle equation.)
    below = theta_branch(fig3_params.replace(g_tilde=1.0))
    assert len(below) == 2
    assert sorted(np.sign(sin_theta(b)) for b in below) == [-1.0, 1.0]
    above = theta_branch(fig3_params.replace(g_tilde=2.5))
    assert len(above) == 2
    assert all(sin_theta(b) > 0 for b in above)


def test_theta_branch_near_upper_transition(fig3_params):
    g2 = transition_points(fig3_params).g2_star
    branches = theta_branch(fig3_params.replace(g_tilde=g2 * (1 - 1e-8)))
    assert len(branches) == 2
    cos_vals = [b.state[2] for b in branches]
    assert abs(cos_vals[0] - cos_vals[1]) < 1e-3
    assert theta_branch(fig3_params.replace(g_tilde=g2 * (1 + 1e-8))) == []


def test_theta_branch_residuals_and_w0(fig3_params):
    for g in (0.3, 1.0, 2.0, 2.7):
        for b in theta_branch(fig3_params.replace(g_tilde=g)):
            assert b.w == 0.0
            assert b.residual < 1e-12


def test_theta_branch_preconditions(fig3_params):
    with pytest.raises(ValueError):
        theta_branch(fig3_params.replace(lam=0.1))
    with pytest.raises(ValueError):
        theta_branch(fig3_params.replace(eta_i=0.2))


# ---------------------------------------------------------------------------
# Transition points


def test_transition_points_values(fig3_params):
    tp = transition_points(fig3_params)
    assert tp.g1_star == 2.0
    assert abs(tp.g2_star - 2.0 * math.sqrt(2.0)) < 1e-15

    flat = transition_points(fig3_params.replace(delta_ph=0.0))
    assert flat.g2_star == flat.g1_star

    p2 = EffectiveParams(eta_r=1.0, n_spins=2.0, kappa=0.5, delta_ph=0.0)
    assert transition_points(p2).g1_star == 1.0

    lossless = transition_points(fig3_params.replace(kappa=0.0))
    assert lossless.g2_star is None


# ---------------------------------------------------------------------------
# Quartic branch (lam = 0, delta_at free)


def test_quartic_reduces_to_closed_forms(fig3_params):
    p = fig3_params.replace(g_tilde=2.2)
    ws = sorted(b.w for b in quartic_w_branch(p))
    expected = sorted([0.0, 0.0] + [b.w for b in trivial_branch(p)])
    assert np.allclose(ws, expected, atol=1e-8)


def test_quartic_region_r_counts(fig3_params):
    # delta_at/eta = 0.5: a coupling window with four physical roots;
    # delta_at/eta = 3.9: never more than two.
    counts_small = [quartic_root_count(fig3_params.replace(delta_at=0.5, g_tilde=g))
                    for g in np.linspace(0.1, 4.0, 120)]
    assert max(counts_small) == 4
    counts_large = [quartic_root_count(fig3_params.replace(delta_at=3.9, g_tilde=g))
                    for g in np.linspace(0.1, 4.0, 120)]
    assert max(counts_large) <= 2


def test_quartic_roots_validate(fig3_params):
    rng = np.random.default_rng(9)
    kount = 0
    for _ in range(40):
        p = random_params(rng).replace(lam=0.0)
        for b in quartic_w_branch(p):
            kount += 1
            assert b.residual < 1e-9
            assert abs(b.w) <= p.n_spins * (1 + 1e-9)
            # spin sum rule
            assert abs(spin_norm(b.state) - p.n_spins**2) < 1e-8
            # denominator non-negativity at accepted roots
            g2 = p.g_tilde**2
            den = g2**2 * b.w**2 + p.delta_at**2 * p.kappa**2 \
                + p.delta_ph * p.delta_at * (2 * g2 * b.w + p.delta_ph * p.delta_at)
            assert den >= -1e-10
    assert kount > 40


# ---------------------------------------------------------------------------
# lam != 0 branch


def test_lambda_branch_continuity_to_quartic(fig3_params):
    p0 = fig3_params.replace(g_tilde=2.2)
    target = sorted(b.w for b in quartic_w_branch(p0))
    p = p0.replace(lam=1e-7)
    ws = sorted(b.w for b in lambda_poly_branch(p))
    assert len(ws) == len(target)
    assert np.allclose(ws, target, atol=1e-6)


def test_lambda_branch_identity_and_residual(fig3_params):
    for lam, g in ((1.3, 1.5), (1.3, 0.9), (10.0, 1.7), (100.0, 1.96), (1.3, 2.1)):
        p = fig3_params.replace(lam=lam, g_tilde=g)
        branches = lambda_poly_branch(p)
        assert branches
        for b in branches:
            assert b.residual < 1e-9
            if b.alpha2 > 1e-16:
                ident = b.w**2 - lam**2 * b.alpha2 / (lam**2 * b.alpha2 + g**2)
                assert abs(ident) < 1e-8


def test_lambda_branch_alpha2_asymptote(fig3_params):
    # lam/eta = 100 near g1*: field intensity approaches the analytic
    # 1/lam^2 law; the +-w pair mean removes the odd 1/lam correction.
    lam, g1 = 100.0, 2.0
    for rel in (3e-3, 1e-2):
        g = g1 * (1 - rel)
        p = fig3_params.replace(lam=lam, g_tilde=g)
        pair = sorted((b for b in lambda_poly_branch(p) if b.alpha2 > 1e-18),
                      key=lambda b: abs(b.w))[:2]
        a2 = np.mean([b.alpha2 for b in pair])
        pred = (1.0 / lam**2) * (1.0 / 27.0) * (g1 - g) * (10.0 + 13.0 * g)
        assert abs(a2 / pred - 1.0) < 0.10


def test_lambda_branch_preconditions(fig3_params):
    with pytest.raises(ValueError):
        lambda_poly_branch(fig3_params.replace(g_tilde=1.0))
    with pytest.raises(ValueError):
        lambda_poly_branch(fig3_params.replace(lam=1.0, delta_at=0.3, g_tilde=1.0))
    with pytest.raises(ValueError):
        lambda_poly_branch(fig3_params.replace(lam=1.0, eta_i=0.5, g_tilde=1.0))


# ---------------------------------------------------------------------------
# Newton refinement


def test_newton_exact_seed_unchanged(fig3_params):
    p = fig3_params.replace(g_tilde=2.4)
    seed = trivial_branch(p)[0].state
    refined = newton_refine(seed, p)
    assert np.array_equal(refined.state, seed)
    assert refined.residual < 1e-12


def test_newton_recontracts_perturbation(fig3_params):
    p = fig3_params.replace(g_tilde=2.4)
    seed = trivial_branch(p)[1].state
    refined = newton_refine(seed + 1e-3, p)
    # perturbing shifts the conserved shell, so compare against the
    # refined shell's own empty-cavity solution
    assert abs(refined.state[0]) < 1e-10 and abs(refined.state[1]) < 1e-10
    assert abs(refined.state[2] - seed[2]) < 5e-3
    assert refined.residual < 1e-12


def test_newton_results_always_in_root_list(fig3_params):
    # Limit-cycle regime (point A): whatever the seed, a converged result
    # must be a genuine member of the polynomial root list, and hitting the
    # iteration cap raises rather than fabricating a root.
    p = fig3_params.replace(lam=1.3, g_tilde=1.5)
    roots = lambda_poly_branch(p)
    rng = np.random.default_rng(6)
    for _ in range(20):
        seed = random_state_on_sphere(rng, 1.0, alpha_scale=1.0)
        try:
            br = newton_refine(seed, p)
        except NewtonError:
            continue
        assert min(np.max(np.abs(br.state - r.state)) for r in roots) < 1e-7


def test_newton_iteration_cap(fig3_params):
    p = fig3_params.replace(lam=1.3, g_tilde=1.5)
    with pytest.raises(NewtonError, match="convergence|stalled"):
        newton_refine([3.0, -2.0, 0.1, 0.9, 0.4], p, max_iter=2)


# ---------------------------------------------------------------------------
# Sweeps and existence boundaries


def test_sweep_region_ii_alpha2_multiplicity(fig3_params):
    res = continuation_sweep(fig3_params, (2.2, 2.6), steps=5)
    for pt in res.points:
        a2 = sorted(b.alpha2 for b in pt.branches)
        distinct = {round(v, 10) for v in a2}
        assert len(pt.branches) == 4
        assert len(distinct) == 3  # alpha = 0 pair collapses to one value


def test_sweep_zero_width(fig3_params):
    res = continuation_sweep(fig3_params, (1.5, 1.5), steps=7)
    assert len(res.points) == 1
    assert len(res.points[0].branches) == 2


def test_sweep_keeps_branch_identity(fig3_params):
    res = continuation_sweep(fig3_params, (0.5, 2.6), steps=22)
    for pt in res.points:
        labels = {b.branch for b in pt.branches}
        assert "theta+" in labels and "theta-" in labels
    # the empty-cavity pair appears only beyond g1*
    for pt in res.points:
        if pt.g_tilde < 2.0:
            assert not any(b.branch.startswith("alpha0") for b in pt.branches)


def test_sweep_records_branch_loss_at_fold(fig3_params):
    res = continuation_sweep(fig3_params, (2.7, 2.95), steps=6)
    lost = {label for _, label in res.branch_loss_events}
    assert {"theta+", "theta-"} <= lost


def test_sweep_csv_format(tmp_path, fig3_params):
    res = continuation_sweep(fig3_params, (2.2, 2.4), steps=3)
    out = tmp_path / "sweep.csv"
    write_sweep_csv(res, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "g_tilde,branch,alpha2,w,s_x,s_y,residual,stability"
    assert len(lines) == 1 + sum(len(pt.branches) for pt in res.points)


def test_g2_star_numeric_matches_closed_form(fig3_params):
    tp = transition_points(fig3_params)
    assert abs(g2_star_numeric(fig3_params) - tp.g2_star) < 2e-6


def test_g2_star_numeric_shrinks_with_lambda(fig3_params):
    values = [g2_star_numeric(fig3_params.replace(lam=l)) for l in (0.1, 1.0, 10.0)]
    assert values[0] > values[1] > values[2]
    assert abs(values[2] - 2.0) < 5e-3


def test_region_r_interval(fig3_params):
    window = (0.05, 5.0)
    mid = region_r_interval(fig3_params.replace(delta_at=0.5), window)
    assert mid is not None
    lo, hi = mid
    assert 2.0 < lo < hi < 3.0
    assert region_r_interval(fig3_params.replace(delta_at=3.9), window) is None


def test_solve_branches_dispatch(fig3_params):
    assert {b.branch for b in solve_branches(fig3_params.replace(g_tilde=2.2))} == \
        {"alpha0+", "alpha0-", "theta+", "theta-"}
    assert all(b.branch.startswith("quartic")
               for b in solve_branches(fig3_params.replace(g_tilde=2.2, delta_at=0.4)))
    assert all(b.branch.startswith(("lambda",))
               for b in solve_branches(fig3_params.replace(g_tilde=1.5, lam=1.3)))
    mixed = solve_branches(fig3_params.replace(g_tilde=1.5, lam=0.8, delta_at=0.3))
    assert mixed and all(b.branch.startswith("numeric") for b in mixed)
    for b in mixed:
        assert b.residual < 1e-9
