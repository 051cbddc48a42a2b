"""Closed-form large-nonlinearity behavior near the critical coupling
g1* = 2 eta/N, and power-law fitting of the order parameter.

At leading order in 1/lam the field vanishes and the spin locks to
s_x0; near g1* the inversion grows as sqrt(|g - g1*|) with amplitudes
N*sqrt(N/eta) above and N*sqrt(N/(3 eta)) below (ratio sqrt(3)), the
mean-field exponent of an Ising-type transition. The leading field
intensity below g1* is of order 1/lam^2.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "alpha2_asymptotic",
    "fit_critical_exponent",
    "g1_star",
    "sx0",
    "sx0_below_roots",
    "w0",
    "write_scaling_csv",
]


def g1_star(eta: float, n_spins: float) -> float:
    return 2.0 * eta / n_spins


def sx0_below_roots(g_tilde: float, eta: float, n_spins: float) -> tuple[float, float]:
    """Both quadratic roots of the locked spin below g1*; the '+' root
    tends to sqrt(2) N > N for large coupling and is unphysical."""
    root = math.sqrt(1.0 + 2.0 * g_tilde**2 * n_spins**2 / eta**2)
    return (eta / g_tilde) * (1.0 - root), (eta / g_tilde) * (1.0 + root)


def sx0(g_tilde: float, eta: float, n_spins: float) -> list[float]:
    """Leading-order locked spin s_x^(0).

    Returns [-2 eta/g] for g >= g1*, the physical lower root below g1*,
    and both (equal, -N) exactly at g1*.
    """
    if g_tilde <= 0 or eta <= 0 or n_spins <= 0:
        raise ValueError("g_tilde, eta, n_spins must be positive")
    crit = g1_star(eta, n_spins)
    if g_tilde > crit:
        return [-2.0 * eta / g_tilde]
    if g_tilde < crit:
        return [sx0_below_roots(g_tilde, eta, n_spins)[0]]
    return [-2.0 * eta / g_tilde, sx0_below_roots(g_tilde, eta, n_spins)[0]]


def w0(g_tilde: float, eta: float, n_spins: float) -> tuple[float, float]:
    """Signed square-root pair: +-N sqrt(N/eta) sqrt(g - g1*) above the
    critical point, +-N sqrt(N/(3 eta)) sqrt(g1* - g) below."""
    crit = g1_star(eta, n_spins)
    if g_tilde >= crit:
        amp = n_spins * math.sqrt(n_spins / eta) * math.sqrt(g_tilde - crit)
    else:
        amp = n_spins * math.sqrt(n_spins / (3.0 * eta)) * math.sqrt(crit - g_tilde)
    return amp, -amp


def alpha2_asymptotic(g_tilde: float, eta: float, n_spins: float, lam: float) -> float:
    """Leading field intensity |alpha|^2 = (1/lam^2)(1/27)(g1* - g)
    (10 eta/N + 13 g) below g1*; zero above (the field branch is empty
    there)."""
    crit = g1_star(eta, n_spins)
    if g_tilde >= crit:
        return 0.0
    return (1.0 / lam**2) * (1.0 / 27.0) * (crit - g_tilde) \
        * (10.0 * eta / n_spins + 13.0 * g_tilde)


def fit_critical_exponent(samples) -> tuple[float, float]:
    """Least-squares fit of log|w| against log|g - g1*|.

    ``samples`` are (detuning, |w|) pairs from one side of the critical
    point, detuning = |g - g1*|. Returns (exponent, amplitude).
    """
    samples = [(float(dg), float(w)) for dg, w in samples]
    if len(samples) < 8:
        raise ValueError(f"need at least 8 samples, got {len(samples)}")
    if any(dg <= 0 or w <= 0 for dg, w in samples):
        raise ValueError("samples must have positive detuning and |w|")
    x = np.log([dg for dg, _ in samples])
    y = np.log([w for _, w in samples])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(math.exp(intercept))


def write_scaling_csv(rows, path) -> None:
    """Rows of (g_tilde, w_exact, w_asymptotic, alpha2_exact,
    alpha2_asymptotic) for overlay plots near the critical point."""
    fmt = "%.17g"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("g_tilde,w_exact,w_asymptotic,alpha2_exact,alpha2_asymptotic\n")
        for row in rows:
            fh.write(",".join(fmt % v for v in row) + "\n")
