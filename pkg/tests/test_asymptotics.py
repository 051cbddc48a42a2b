import math

import numpy as np
import pytest

from cavity_mf import (EffectiveParams, alpha2_asymptotic, fit_critical_exponent,
                       g1_star, lambda_poly_branch, sx0, trivial_branch, w0)
from cavity_mf.asymptotics import sx0_below_roots, write_scaling_csv


def test_sx0_continuous_at_critical_point():
    for eta, n in ((1.0, 1.0), (0.7, 3.0), (2.0, 2.0)):
        crit = g1_star(eta, n)
        vals = sx0(crit, eta, n)
        assert len(vals) == 2
        assert all(abs(v + n) < 1e-12 for v in vals)


def test_sx0_limits():
    assert abs(sx0(1e-8, 1.0, 1.0)[0]) < 1e-6          # -> 0 as g -> 0
    hi = sx0(1e8, 1.0, 1.0)[0]
    assert -1e-6 < hi < 0                              # -> 0 from below as g -> inf


def test_sx0_lower_root_monotone_decreasing():
    gs = np.linspace(1e-3, 2.0, 200)
    vals = [sx0(g, 1.0, 1.0)[0] for g in gs]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_sx0_plus_root_unphysical():
    # The '+' root exceeds the spin length for large coupling and tends to
    # sqrt(2) N; it is rejected from the public accessor.
    minus, plus = sx0_below_roots(100.0, 1.0, 1.0)
    assert plus > 1.0
    minus, plus = sx0_below_roots(1e5, 1.0, 1.0)  # approach is O(1/g)
    assert abs(plus - math.sqrt(2.0)) < 1e-4
    assert abs(minus + math.sqrt(2.0)) < 1e-4
    assert all(len(sx0(g, 1.0, 1.0)) == 1 for g in (0.5, 3.0))


def test_w0_at_critical_point_and_ratio():
    assert w0(2.0, 1.0, 1.0) == (0.0, 0.0)
    dg = 1e-3
    above = w0(2.0 + dg, 1.0, 1.0)[0]
    below = w0(2.0 - dg, 1.0, 1.0)[0]
    assert above > 0 > w0(2.0 + dg, 1.0, 1.0)[1]
    assert abs(above / below - math.sqrt(3.0)) < 1e-12


def test_alpha2_values():
    assert alpha2_asymptotic(2.0, 1.0, 1.0, 50.0) == 0.0
    assert alpha2_asymptotic(2.5, 1.0, 1.0, 50.0) == 0.0
    expected_at_zero = (1.0 / 50.0**2) * 10.0 * 1.0 * 2.0 / 27.0
    assert abs(alpha2_asymptotic(0.0, 1.0, 1.0, 50.0) - expected_at_zero) < 1e-18


def test_fit_exact_power_law():
    dgs = np.geomspace(1e-4, 5e-2, 12)
    samples = [(dg, 3.0 * dg**0.5) for dg in dgs]
    exponent, amplitude = fit_critical_exponent(samples)
    assert abs(exponent - 0.5) < 1e-12
    assert abs(amplitude - 3.0) < 1e-12


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError, match="at least 8"):
        fit_critical_exponent([(1e-3, 0.1)] * 7)
    with pytest.raises(ValueError, match="positive"):
        fit_critical_exponent([(1e-3, 0.0)] * 8)


# ---------------------------------------------------------------------------
# Cross-validation against the full polynomial solver


def _exact_w_below(p, g):
    pair = sorted((b for b in lambda_poly_branch(p.replace(g_tilde=g))
                   if b.alpha2 > 1e-18), key=lambda b: abs(b.w))[:2]
    return float(np.mean([abs(b.w) for b in pair]))


def test_w0_matches_solver_at_large_lambda(fig3_params):
    p = fig3_params.replace(lam=100.0)
    for rel in (5e-3, 1e-2, 2e-2):
        g_below = 2.0 * (1 - rel)
        assert abs(_exact_w_below(p, g_below) / w0(g_below, 1.0, 1.0)[0] - 1) < 0.05
        g_above = 2.0 * (1 + rel)
        w_exact = max(abs(b.w) for b in trivial_branch(p.replace(g_tilde=g_above)))
        assert abs(w_exact / w0(g_above, 1.0, 1.0)[0] - 1) < 0.05


def test_w0_error_shrinks_with_lambda(fig3_params):
    g = 2.0 * (1 - 5e-3)
    pred = w0(g, 1.0, 1.0)[0]
    errs = [abs(_exact_w_below(fig3_params.replace(lam=lam), g) - pred)
            for lam in (10.0, 30.0, 100.0, 300.0)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_fit_documented_deviation_at_small_lambda(fig3_params):
    # lam/eta = 1 is far from the asymptotic regime; the fit must run but
    # no exponent tolerance is claimed.
    p = fig3_params.replace(lam=1.0)
    dgs = np.geomspace(1e-3, 2e-2, 10)
    samples = [(2.0 * rel, _exact_w_below(p, 2.0 * (1 - rel))) for rel in dgs]
    exponent, amplitude = fit_critical_exponent(samples)
    assert math.isfinite(exponent) and math.isfinite(amplitude)


def test_scaling_csv(tmp_path):
    rows = [(1.99, 0.1, 0.11, 1e-6, 1.1e-6)]
    out = tmp_path / "scaling.csv"
    write_scaling_csv(rows, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "g_tilde,w_exact,w_asymptotic,alpha2_exact,alpha2_asymptotic"
    assert len(lines) == 2
