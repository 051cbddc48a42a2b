"""Steady states of the 2D array under the homogeneous and two-site
cluster ansaetze.

Spins are normalized per site (w^2 + 4|s|^2 = 1). A row mode couples to
n_cols sites and a column mode to n_rows; under the cluster ansatz each
mode sees the two sublattices in equal number, hence the n/2 factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import Params2D

__all__ = [
    "ClusterFixedPoint",
    "ClusterResult",
    "Homogeneous2DResult",
    "cluster_2d",
    "cluster_residual",
    "homogeneous_2d",
    "homogeneous_branch_points",
    "homogeneous_g1_star",
]

CLUSTER_TOL = 1e-11
DEDUP_TOL = 1e-6


# ---------------------------------------------------------------------------
# Homogeneous ansatz (lam = delta_at = gamma = 0)


def _require_homogeneous_regime(p: Params2D):
    if p.lam != 0.0 or p.delta_at != 0.0 or p.gamma != 0.0:
        raise ValueError("homogeneous closed form requires lam = delta_at = gamma = 0")


def _dark_field_spin(p: Params2D, g_a: float) -> complex:
    """Shared spin s on the g_a*alpha + g_b*beta = 0 branch."""
    za = p.delta_ph_a - 1j * p.kappa
    zb = p.delta_ph_b - 1j * p.kappa
    num = -p.eta * (g_a * zb + p.g_tilde_b * za)
    den = g_a**2 * p.n_cols * zb + p.g_tilde_b**2 * p.n_rows * za
    return num / den


@dataclass(frozen=True)
class Homogeneous2DResult:
    """Transition point of the homogeneous array (w = 0, |s| = 1/2) plus
    the fixed point there."""

    g1_star: float | None
    alpha: complex | None
    beta: complex | None
    s: complex | None
    w: float | None
    s_abs2: float | None  # |s|^2 at the critical coupling (should be 1/4)


def homogeneous_g1_star(p: Params2D) -> float | None:
    """Critical g_tilde_a where the dark-field branch reaches |s|^2 = 1/4,
    all other parameters fixed; None when no positive real root exists."""
    _require_homogeneous_regime(p)
    gb, dpa, dpb, kap = p.g_tilde_b, p.delta_ph_a, p.delta_ph_b, p.kappa
    nr, nc = p.n_rows, p.n_cols
    eta2 = abs(p.eta) ** 2
    num = np.polyadd(np.polymul([dpb, dpa * gb], [dpb, dpa * gb]),
                     kap**2 * np.polymul([1.0, gb], [1.0, gb]))
    den = np.polyadd(np.polymul([dpb * nc, 0.0, dpa * gb**2 * nr],
                                [dpb * nc, 0.0, dpa * gb**2 * nr]),
                     kap**2 * np.polymul([nc, 0.0, gb**2 * nr], [nc, 0.0, gb**2 * nr]))
    poly = np.polyadd(0.25 * den, -eta2 * np.concatenate([[0.0, 0.0], num]))
    roots = np.roots(poly)
    real_pos = sorted(r.real for r in roots
                      if abs(r.imag) <= 1e-10 * (1.0 + abs(r)) and r.real > 0.0)
    return real_pos[0] if real_pos else None


def homogeneous_2d(p: Params2D) -> Homogeneous2DResult:
    """Solve the homogeneous branch structure and return the transition
    fixed point (alpha, beta, s, w = 0) along with the critical coupling."""
    crit = homogeneous_g1_star(p)
    if crit is None:
        return Homogeneous2DResult(None, None, None, None, None, None)
    s = _dark_field_spin(p, crit)
    za = p.delta_ph_a - 1j * p.kappa
    zb = p.delta_ph_b - 1j * p.kappa
    alpha = -(crit * p.n_cols * s + p.eta) / za
    beta = -(p.g_tilde_b * p.n_rows * s + p.eta) / zb
    return Homogeneous2DResult(g1_star=crit, alpha=alpha, beta=beta, s=s, w=0.0,
                               s_abs2=abs(s) ** 2)


def homogeneous_branch_points(p: Params2D) -> list[tuple[complex, complex, complex, float]]:
    """Dark-field fixed points (alpha, beta, s, w) at the given parameters;
    two w signs when |s| < 1/2, empty when |s| > 1/2."""
    _require_homogeneous_regime(p)
    s = _dark_field_spin(p, p.g_tilde_a)
    disc = 1.0 - 4.0 * abs(s) ** 2
    if disc < 0.0:
        return []
    za = p.delta_ph_a - 1j * p.kappa
    zb = p.delta_ph_b - 1j * p.kappa
    alpha = -(p.g_tilde_a * p.n_cols * s + p.eta) / za
    beta = -(p.g_tilde_b * p.n_rows * s + p.eta) / zb
    w = math.sqrt(disc)
    pts = [(alpha, beta, s, w)]
    if w > 0.0:
        pts.append((alpha, beta, s, -w))
    return pts


# ---------------------------------------------------------------------------
# Two-site cluster ansatz


@dataclass(frozen=True)
class ClusterFixedPoint:
    alpha: complex
    beta: complex
    s1: complex
    s2: complex
    w1: float
    w2: float
    residual: float

    @property
    def w_asymmetry(self) -> float:
        return abs(self.w1 - self.w2)

    @property
    def s_asymmetry(self) -> float:
        return abs(self.s1 - self.s2)


@dataclass(frozen=True)
class ClusterResult:
    roots: list[ClusterFixedPoint]
    n_converged: int
    n_failed: int

    @property
    def max_w_asymmetry(self) -> float:
        return max((r.w_asymmetry for r in self.roots), default=0.0)

    @property
    def max_s_asymmetry(self) -> float:
        return max((r.s_asymmetry for r in self.roots), default=0.0)


def cluster_residual(x: np.ndarray, p: Params2D) -> np.ndarray:
    """Cluster fixed-point residual; 10 rows, plus the local and global
    spin-shell constraints when gamma = 0 (the flow conserves them, so
    physical roots must sit on the shell)."""
    al = complex(x[0], x[1])
    be = complex(x[2], x[3])
    s1 = complex(x[4], x[5])
    s2 = complex(x[6], x[7])
    w1, w2 = x[8], x[9]
    ga, gb = p.g_tilde_a, p.g_tilde_b
    hc, hr = 0.5 * p.n_cols, 0.5 * p.n_rows
    big_w = w1 + w2
    field = ga * al + gb * be
    u = al + be
    fa = ((p.delta_ph_a - 1j * p.kappa) + p.lam * hc * big_w) * al \
        + ga * hc * (s1 + s2) + p.eta + p.lam * be * (hc * big_w - p.n_cols)
    fb = ((p.delta_ph_b - 1j * p.kappa) + p.lam * hr * big_w) * be \
        + gb * hr * (s1 + s2) + p.eta + p.lam * al * (hr * big_w - p.n_rows)
    dd = p.delta_at - 0.5j * p.gamma + 2.0 * p.lam * abs(u) ** 2
    fs1 = dd * s1 - field * w1
    fs2 = dd * s2 - field * w2
    fw1 = 4.0 * (s1.conjugate() * field).imag - p.gamma * (w1 + 1.0)
    fw2 = 4.0 * (s2.conjugate() * field).imag - p.gamma * (w2 + 1.0)
    rows = [fa.real, fa.imag, fb.real, fb.imag, fs1.real, fs1.imag,
            fs2.real, fs2.imag, fw1, fw2]
    if p.gamma == 0.0:
        rows += [w1**2 + 4.0 * abs(s1) ** 2 - 1.0,
                 w2**2 + 4.0 * abs(s2) ** 2 - 1.0,
                 big_w**2 + 4.0 * abs(s1 + s2) ** 2 - 4.0]
    return np.array(rows)


def _cluster_jacobian(x: np.ndarray, p: Params2D) -> np.ndarray:
    al = complex(x[0], x[1])
    be = complex(x[2], x[3])
    s1 = complex(x[4], x[5])
    s2 = complex(x[6], x[7])
    w1, w2 = x[8], x[9]
    ga, gb = p.g_tilde_a, p.g_tilde_b
    hc, hr = 0.5 * p.n_cols, 0.5 * p.n_rows
    big_w = w1 + w2
    field = ga * al + gb * be
    u = al + be
    ca = (p.delta_ph_a - 1j * p.kappa) + p.lam * hc * big_w
    cb = (p.delta_ph_b - 1j * p.kappa) + p.lam * hr * big_w
    dd = p.delta_at - 0.5j * p.gamma + 2.0 * p.lam * abs(u) ** 2

    def cols(fn):
        # complex derivative of a row w.r.t. each of the 10 real unknowns
        return np.array(fn, dtype=complex)

    d_fa = cols([ca, 1j * ca,
                 p.lam * (hc * big_w - p.n_cols), 1j * p.lam * (hc * big_w - p.n_cols),
                 ga * hc, 1j * ga * hc, ga * hc, 1j * ga * hc,
                 p.lam * hc * (al + be), p.lam * hc * (al + be)])
    d_fb = cols([p.lam * (hr * big_w - p.n_rows), 1j * p.lam * (hr * big_w - p.n_rows),
                 cb, 1j * cb,
                 gb * hr, 1j * gb * hr, gb * hr, 1j * gb * hr,
                 p.lam * hr * (al + be), p.lam * hr * (al + be)])
    lam4 = 4.0 * p.lam
    d_fs1 = cols([lam4 * u.real * s1 - ga * w1, lam4 * u.imag * s1 - 1j * ga * w1,
                  lam4 * u.real * s1 - gb * w1, lam4 * u.imag * s1 - 1j * gb * w1,
                  dd, 1j * dd, 0.0, 0.0, -field, 0.0])
    d_fs2 = cols([lam4 * u.real * s2 - ga * w2, lam4 * u.imag * s2 - 1j * ga * w2,
                  lam4 * u.real * s2 - gb * w2, lam4 * u.imag * s2 - 1j * gb * w2,
                  0.0, 0.0, dd, 1j * dd, 0.0, -field])
    d_fw1 = np.array([-4.0 * ga * s1.imag, 4.0 * ga * s1.real,
                      -4.0 * gb * s1.imag, 4.0 * gb * s1.real,
                      4.0 * field.imag, -4.0 * field.real, 0.0, 0.0, -p.gamma, 0.0])
    d_fw2 = np.array([-4.0 * ga * s2.imag, 4.0 * ga * s2.real,
                      -4.0 * gb * s2.imag, 4.0 * gb * s2.real,
                      0.0, 0.0, 4.0 * field.imag, -4.0 * field.real, 0.0, -p.gamma])
    rows = [d_fa.real, d_fa.imag, d_fb.real, d_fb.imag,
            d_fs1.real, d_fs1.imag, d_fs2.real, d_fs2.imag, d_fw1, d_fw2]
    if p.gamma == 0.0:
        ssum = s1 + s2
        rows += [
            np.array([0, 0, 0, 0, 8 * s1.real, 8 * s1.imag, 0, 0, 2 * w1, 0.0]),
            np.array([0, 0, 0, 0, 0, 0, 8 * s2.real, 8 * s2.imag, 0.0, 2 * w2]),
            np.array([0, 0, 0, 0, 8 * ssum.real, 8 * ssum.imag,
                      8 * ssum.real, 8 * ssum.imag, 2 * big_w, 2 * big_w]),
        ]
    return np.vstack(rows)


def _gauss_newton(x0: np.ndarray, p: Params2D, tol: float, max_iter: int = 80):
    x = np.asarray(x0, dtype=float).copy()
    fval = cluster_residual(x, p)
    for _ in range(max_iter):
        if float(np.max(np.abs(fval))) < tol:
            return x, True
        jac = _cluster_jacobian(x, p)
        step = np.linalg.lstsq(jac, -fval, rcond=None)[0]
        norm0 = float(fval @ fval)
        damping = 1.0
        for _ in range(30):
            trial = x + damping * step
            ftrial = cluster_residual(trial, p)
            nrm2 = float(ftrial @ ftrial)
            if nrm2 == nrm2 and nrm2 < norm0:  # NaN-safe decrease test
                x, fval = trial, ftrial
                break
            damping *= 0.5
        else:
            return x, False
    return x, False


def _symmetrize_gamma0(x: np.ndarray, p: Params2D, tol: float) -> np.ndarray | None:
    """For gamma = 0 the spin-shell constraints are quadratically
    degenerate along the sublattice-asymmetry direction, so Newton stops
    with |w1 - w2| ~ sqrt(tol). The on-shell root itself is symmetric;
    polish within the symmetric subspace and accept only if the full
    residual still vanishes."""
    z = np.array([x[0], x[1], x[2], x[3],
                  0.5 * (x[4] + x[6]), 0.5 * (x[5] + x[7]),
                  0.5 * (x[8] + x[9])])

    def reduced(v):
        full = np.array([v[0], v[1], v[2], v[3], v[4], v[5], v[4], v[5], v[6], v[6]])
        r = cluster_residual(full, p)
        return np.concatenate([r[:10], [r[10]]])  # one shell constraint suffices

    for _ in range(60):
        f = reduced(z)
        if float(np.max(np.abs(f))) < 0.1 * tol:
            break
        jac = np.empty((f.size, 7))
        for j in range(7):
            h = 1e-7 * (1.0 + abs(z[j]))
            zp = z.copy()
            zp[j] += h
            jac[:, j] = (reduced(zp) - f) / h
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        norm0 = float(np.linalg.norm(f))
        damping = 1.0
        for _ in range(30):
            trial = z + damping * step
            if float(np.linalg.norm(reduced(trial))) < norm0:
                z = trial
                break
            damping *= 0.5
        else:
            return None
    full = np.array([z[0], z[1], z[2], z[3], z[4], z[5], z[4], z[5], z[6], z[6]])
    if float(np.max(np.abs(cluster_residual(full, p)))) < tol:
        return full
    return None


def _seed_states(p: Params2D, n_seeds: int, rng: np.random.Generator) -> list[np.ndarray]:
    scale = max(1.0, abs(p.eta) / max(p.kappa, 0.1))
    seeds = []
    # structured antiferromagnetic seeds: w1 ~ -w2, opposite s phases
    for w0 in (0.25, 0.5, 0.75, 0.95):
        for sgn in (1.0, -1.0):
            s_mag = 0.5 * math.sqrt(1.0 - w0**2)
            seeds.append(np.array([0.3 * scale, 0.0, 0.3 * scale, 0.0,
                                   s_mag, 0.0, -s_mag, 0.0, sgn * w0, -sgn * w0]))
    for _ in range(n_seeds):
        w1, w2 = rng.uniform(-1.0, 1.0, size=2)
        ph1, ph2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
        s1 = 0.5 * math.sqrt(1.0 - w1**2) * np.exp(1j * ph1)
        s2 = 0.5 * math.sqrt(1.0 - w2**2) * np.exp(1j * ph2)
        al = rng.normal(scale=scale) + 1j * rng.normal(scale=scale)
        be = rng.normal(scale=scale) + 1j * rng.normal(scale=scale)
        seeds.append(np.array([al.real, al.imag, be.real, be.imag,
                               s1.real, s1.imag, s2.real, s2.imag, w1, w2]))
    return seeds


def cluster_2d(p: Params2D, n_seeds: int = 64, seed: int = 0,
               tol: float = CLUSTER_TOL) -> ClusterResult:
    """Newton-solve the cluster fixed-point equations from random on-shell
    seeds plus structured antiferromagnetic seeds; converged roots are
    deduplicated and counted."""
    rng = np.random.default_rng(seed)
    roots: list[np.ndarray] = []
    n_conv = n_fail = 0
    for x0 in _seed_states(p, n_seeds, rng):
        x, ok = _gauss_newton(x0, p, tol)
        if not ok:
            n_fail += 1
            continue
        if p.gamma == 0.0:
            sym = _symmetrize_gamma0(x, p, tol)
            if sym is not None:
                x = sym
        n_conv += 1
        if not any(np.max(np.abs(x - r)) < DEDUP_TOL for r in roots):
            roots.append(x)
    roots.sort(key=lambda r: (round(r[8], 9), round(r[0], 9), round(r[1], 9)))
    out = [ClusterFixedPoint(alpha=complex(r[0], r[1]), beta=complex(r[2], r[3]),
                             s1=complex(r[4], r[5]), s2=complex(r[6], r[7]),
                             w1=float(r[8]), w2=float(r[9]),
                             residual=float(np.max(np.abs(cluster_residual(r, p)[:10]))))
           for r in roots]
    return ClusterResult(roots=out, n_converged=n_conv, n_failed=n_fail)
