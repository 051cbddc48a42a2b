"""Steady-state branches of the single-cavity model.

Branch families, by parameter regime (pump eta, coupling g_tilde, spin
length N):

* ``alpha0+`` / ``alpha0-``: empty-cavity solutions with
  s_x = -2 eta_r/g, s_y = 2 eta_i/g, w = +-sqrt(N^2 - 4 eta^2/g^2); they
  exist for g >= 2 eta/N (the lower transition point g1*).
* ``theta+`` / ``theta-``: w = 0 solutions parametrized by the spin angle,
  s_x = N cos(theta), s_y = -N sin(theta); for eta_i = 0 the angle solves
  z + kappa cos(theta) = delta_ph sin(theta) with z = kappa g N/(2 eta_r),
  and they exist up to g2* = (2 eta_r/N) sqrt(1 + (delta_ph/kappa)^2).
* ``quartic<k>``: lam = 0, delta_at != 0 roots of the quartic in w obtained
  by eliminating the field and spin from the fixed-point equations.
* ``lambda<k>``: delta_at = 0, lam != 0 roots of a degree <= 6 polynomial in
  w (the empty-cavity quadratic factor times a quartic for the alpha != 0
  family).
* ``numeric<k>``: multi-seeded damped Newton, used where no polynomial
  reduction applies (lam != 0 together with delta_at != 0).

All accepted branches are polished to machine precision and re-validated
against the dynamics RHS, never against the solving algebra alone.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import as_state_array, rhs_1d, rhs_1d_jacobian, spin_norm
from .params import EffectiveParams

__all__ = [
    "NewtonError",
    "SteadyBranch",
    "SweepPoint",
    "SweepResult",
    "TransitionPoints",
    "continuation_sweep",
    "g2_star_numeric",
    "lambda_poly_branch",
    "newton_refine",
    "numeric_branches",
    "quartic_w_branch",
    "quartic_root_count",
    "region_r_interval",
    "residual_of",
    "solve_branches",
    "theta_branch",
    "transition_points",
    "trivial_branch",
    "write_sweep_csv",
]

RESIDUAL_ACCEPT = 1e-9
NEWTON_TOL = 1e-12
REAL_IMAG_TOL = 1e-8
POLY_BACKWARD_TOL = 1e-10
DEDUP_TOL = 1e-7

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class SteadyBranch:
    """A fixed point with its branch label and an RHS residual."""

    state: np.ndarray
    branch: str
    g_tilde: float
    residual: float
    stability: str = UNKNOWN

    @property
    def alpha2(self) -> float:
        return float(self.state[0] ** 2 + self.state[1] ** 2)

    @property
    def w(self) -> float:
        return float(self.state[4])

    def with_stability(self, verdict: str) -> "SteadyBranch":
        return dataclasses.replace(self, stability=verdict)


@dataclass(frozen=True)
class TransitionPoints:
    g1_star: float
    g2_star: float | None

    def __post_init__(self):
        if self.g2_star is not None and self.g2_star < self.g1_star:
            raise ValueError("g2_star must be >= g1_star")


def residual_of(state, p: EffectiveParams) -> float:
    """Max-norm of the dynamics RHS; the acceptance check for every branch."""
    return float(np.max(np.abs(rhs_1d(state, p))))


def _mk_branch(state, label: str, p: EffectiveParams, polish: bool = True) -> SteadyBranch | None:
    state = np.asarray(state, dtype=float)
    res = residual_of(state, p)
    if polish and res > 1e-12:
        try:
            refined = newton_refine(state, p)
        except NewtonError:
            refined = None
        if refined is not None and residual_of(refined.state, p) < res:
            state, res = refined.state, refined.residual
    if res > RESIDUAL_ACCEPT or not np.all(np.isfinite(state)):
        return None
    return SteadyBranch(state=state, branch=label, g_tilde=p.g_tilde, residual=res)


# ---------------------------------------------------------------------------
# Closed-form families (lam = 0, delta_at = 0)


def trivial_branch(p: EffectiveParams) -> list[SteadyBranch]:
    """Empty-cavity (alpha = 0) fixed points.

    Valid for delta_at = 0 and any lam (the nonlinear terms all carry a
    factor of alpha). Empty below g1* = 2 eta/N and for g_tilde = 0.
    """
    if p.delta_at != 0.0:
        raise ValueError("trivial branch requires delta_at = 0")
    g = p.g_tilde
    if g == 0.0:
        return []
    n2 = p.n_spins**2
    disc = n2 - 4.0 * p.eta**2 / g**2
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    sx, sy = -2.0 * p.eta_r / g, 2.0 * p.eta_i / g
    out = []
    for label, w in (("alpha0+", root), ("alpha0-", -root)):
        br = _mk_branch([0.0, 0.0, sx, sy, w], label, p)
        if br is not None:
            out.append(br)
        if root == 0.0:
            break  # coincident pair at the transition point
    return out


def _theta_state(p: EffectiveParams, cos_t: float, sin_t: float) -> np.ndarray:
    n = p.n_spins
    pp = p.g_tilde * n * sin_t + 2.0 * p.eta_i
    qq = p.g_tilde * n * cos_t + 2.0 * p.eta_r
    det = p.delta_ph**2 + p.kappa**2
    ar = (p.kappa * pp - p.delta_ph * qq) / (2.0 * det)
    ai = -(p.delta_ph * pp + p.kappa * qq) / (2.0 * det)
    return np.array([ar, ai, n * cos_t, -n * sin_t, 0.0])


def theta_branch(p: EffectiveParams) -> list[SteadyBranch]:
    """w = 0 fixed points for lam = 0, delta_at = 0, eta_i = 0.

    cos(theta) solves the quadratic
    (kappa^2 + delta_ph^2) c^2 + 2 kappa z c + z^2 - delta_ph^2 = 0 and the
    sign of sin(theta) is fixed by substituting back into the angle
    equation, not by a fixed square-root convention.
    """
    if p.lam != 0.0 or p.delta_at != 0.0:
        raise ValueError("theta branch requires lam = 0 and delta_at = 0")
    if p.eta_i != 0.0:
        raise ValueError("closed-form theta branch requires eta_i = 0")
    if p.eta_r == 0.0 or (p.kappa == 0.0 and p.delta_ph == 0.0):
        return []
    z = p.kappa * p.g_tilde * p.n_spins / (2.0 * p.eta_r)
    a2 = p.kappa**2 + p.delta_ph**2
    disc = p.kappa**2 * z**2 - (z**2 - p.delta_ph**2) * a2
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    out = []
    for label, sgn in (("theta+", 1.0), ("theta-", -1.0)):
        cos_t = (-p.kappa * z + sgn * sq) / a2
        if abs(cos_t) > 1.0:
            continue
        sin_abs = math.sqrt(max(0.0, 1.0 - cos_t**2))
        if p.delta_ph != 0.0:
            sins = [(z + p.kappa * cos_t) / p.delta_ph]
        else:
            sins = [sin_abs, -sin_abs] if sin_abs > 0 else [0.0]
        for sin_t in sins:
            br = _mk_branch(_theta_state(p, cos_t, sin_t), label, p)
            if br is not None:
                out.append(br)
    return out


def _theta_general(p: EffectiveParams) -> list[SteadyBranch]:
    # w = 0 family for eta_i != 0: a cos(t) + b sin(t) = -c.
    a = 2.0 * (p.eta_i * p.delta_ph + p.eta_r * p.kappa)
    b = 2.0 * (p.eta_i * p.kappa - p.eta_r * p.delta_ph)
    c = p.kappa * p.g_tilde * p.n_spins
    r = math.hypot(a, b)
    if r == 0.0 or abs(c) > r:
        return []
    phi = math.atan2(b, a)
    base = math.acos(max(-1.0, min(1.0, -c / r)))
    out = []
    for k, t in enumerate((phi + base, phi - base)):
        br = _mk_branch(_theta_state(p, math.cos(t), math.sin(t)), f"theta{k}", p)
        if br is not None:
            out.append(br)
    return out


def transition_points(p: EffectiveParams) -> TransitionPoints:
    """g1* = 2 eta/N and g2* = g1* sqrt(1 + (delta_ph/kappa)^2).

    g2* is absent in the lossless limit kappa = 0 where the closed form is
    singular.
    """
    g1 = 2.0 * p.eta / p.n_spins
    if p.kappa == 0.0:
        return TransitionPoints(g1_star=g1, g2_star=None)
    return TransitionPoints(g1_star=g1, g2_star=g1 * math.sqrt(1.0 + (p.delta_ph / p.kappa) ** 2))


# ---------------------------------------------------------------------------
# Polynomial root machinery


def _real_roots(coeffs: np.ndarray) -> np.ndarray:
    """All real roots of a polynomial (highest degree first), via the
    companion matrix, with backward-error acceptance relative to the
    largest coefficient."""
    coeffs = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return np.array([])
    coeffs = coeffs / scale
    nz = np.flatnonzero(np.abs(coeffs) > 1e-14)
    if nz.size == 0:
        return np.array([])
    coeffs = coeffs[nz[0]:]
    if coeffs.size <= 1:
        return np.array([])
    roots = np.roots(coeffs)
    keep = []
    for r in roots:
        if abs(r.imag) > REAL_IMAG_TOL * (1.0 + abs(r.real)):
            continue
        x = float(r.real)
        if abs(np.polyval(coeffs, x)) <= POLY_BACKWARD_TOL * max(1.0, abs(x) ** (coeffs.size - 1)):
            keep.append(x)
    return np.array(sorted(keep))


def _quartic_coeffs(p: EffectiveParams) -> np.ndarray:
    # (w^2 - N^2) * [g^4 w^2 + 2 g^2 dph dat w + dat^2 (kappa^2 + dph^2)]
    #   + 4 g^2 eta^2 w^2 = 0
    g2 = p.g_tilde**2
    dd = np.array([g2 * g2, 2.0 * g2 * p.delta_ph * p.delta_at,
                   p.delta_at**2 * (p.kappa**2 + p.delta_ph**2)])
    poly = np.polymul(np.array([1.0, 0.0, -p.n_spins**2]), dd)
    return np.polyadd(poly, np.array([4.0 * g2 * p.eta**2, 0.0, 0.0]))


def _quartic_state(p: EffectiveParams, w: float) -> np.ndarray | None:
    aa = p.delta_ph + p.g_tilde**2 * w / p.delta_at
    det = p.kappa**2 + aa**2
    if det == 0.0:
        return None
    ar = (p.kappa * p.eta_i - aa * p.eta_r) / det
    ai = -(aa * p.eta_i + p.kappa * p.eta_r) / det
    return np.array([ar, ai, 2.0 * p.g_tilde * w * ar / p.delta_at,
                     -2.0 * p.g_tilde * w * ai / p.delta_at, w])


def quartic_root_count(p: EffectiveParams) -> int:
    """Number of physical (|w| <= N) real roots of the quartic in w."""
    if p.lam != 0.0:
        raise ValueError("the w quartic applies to lam = 0")
    roots = _real_roots(_quartic_coeffs(p))
    return int(np.sum(np.abs(roots) <= p.n_spins * (1.0 + 1e-12)))


def quartic_w_branch(p: EffectiveParams) -> list[SteadyBranch]:
    """lam = 0 fixed points from the quartic in w (delta_at arbitrary).

    For delta_at = 0 the quartic degenerates (w = 0 double root plus the
    empty-cavity pair) and the closed-form families are returned instead.
    """
    if p.lam != 0.0:
        raise ValueError("the w quartic applies to lam = 0")
    if p.delta_at == 0.0:
        thetas = theta_branch(p) if p.eta_i == 0.0 else _theta_general(p)
        return trivial_branch(p) + thetas
    out = []
    for k, w in enumerate(_real_roots(_quartic_coeffs(p))):
        if abs(w) > p.n_spins * (1.0 + 1e-12):
            continue
        state = _quartic_state(p, w)
        if state is None:
            continue
        br = _mk_branch(state, f"quartic{k}", p)
        if br is not None:
            out.append(br)
    return out


def _lambda_quartic_coeffs(p: EffectiveParams) -> np.ndarray:
    # alpha != 0 family, delta_at = 0, eta_i = 0:
    # g^2 (lam w^2 + 2 dph w + lam N^2)^2 + 4 g^2 kappa^2 w^2
    #   + 4 eta^2 lam^2 (w^2 - N^2) = 0
    g2, l2, n2 = p.g_tilde**2, p.lam**2, p.n_spins**2
    inner = np.array([p.lam, 2.0 * p.delta_ph, p.lam * n2])
    poly = g2 * np.polymul(inner, inner)
    return np.polyadd(poly, np.array([4.0 * g2 * p.kappa**2 + 4.0 * p.eta**2 * l2,
                                      0.0, -4.0 * p.eta**2 * l2 * n2]))


def _lambda_state(p: EffectiveParams, w: float) -> np.ndarray | None:
    n2 = p.n_spins**2
    if w == 0.0 or abs(w) >= p.n_spins:
        return None
    intensity = p.g_tilde**2 * w**2 / (p.lam**2 * (n2 - w**2))
    bb = p.delta_ph + p.lam * (n2 + w**2) / (2.0 * w)
    det = bb**2 + p.kappa**2
    ar = -p.eta_r * bb / det
    ai = -p.eta_r * p.kappa / det
    prefac = p.g_tilde * w / (p.lam * intensity)
    return np.array([ar, ai, prefac * ar, -prefac * ai, w])


def lambda_poly_w_roots(p: EffectiveParams) -> np.ndarray:
    """Physical w roots of the alpha != 0 family for lam != 0."""
    roots = _real_roots(_lambda_quartic_coeffs(p))
    return roots[(np.abs(roots) < p.n_spins) & (roots != 0.0)]


def lambda_poly_branch(p: EffectiveParams) -> list[SteadyBranch]:
    """delta_at = 0, lam != 0 fixed points.

    Eliminating the field and spin reduces the fixed-point set to a single
    polynomial in w of degree <= 6: the empty-cavity quadratic
    g^2 w^2 - (g^2 N^2 - 4 eta^2) times the quartic of the alpha != 0
    family. Roots are found by the companion matrix, reconstructed, Newton
    polished, and checked against w^2 = lam^2 |alpha|^2 N^2 /
    (lam^2 |alpha|^2 + g^2).
    """
    if p.lam == 0.0:
        raise ValueError("lambda_poly_branch requires lam != 0")
    if p.delta_at != 0.0:
        raise ValueError("lambda_poly_branch requires delta_at = 0")
    if p.eta_i != 0.0:
        raise ValueError("lambda_poly_branch requires eta_i = 0")
    g2 = p.g_tilde**2
    quart = _lambda_quartic_coeffs(p)
    triv = np.array([g2, 0.0, -(g2 * p.n_spins**2 - 4.0 * p.eta**2)])
    sextic = np.polymul(quart, triv)
    states = []
    for w in _real_roots(sextic):
        if abs(w) > p.n_spins * (1.0 + 1e-12):
            continue
        scale_q = max(1.0, abs(w)) ** 4 * np.max(np.abs(quart))
        scale_t = max(1.0, abs(w)) ** 2 * np.max(np.abs(triv))
        if abs(np.polyval(triv, w)) <= 1e-8 * scale_t:
            states.append(np.array([0.0, 0.0, -2.0 * p.eta_r / p.g_tilde, 0.0, w]))
        if abs(np.polyval(quart, w)) <= 1e-8 * scale_q:
            st = _lambda_state(p, w)
            if st is not None:
                states.append(st)
    out = []
    for st in states:
        br = _mk_branch(st, "lambda", p)
        if br is None:
            continue
        if any(np.max(np.abs(br.state - b.state)) < DEDUP_TOL for b in out):
            continue
        out.append(br)
    out.sort(key=lambda b: b.w)
    out = [dataclasses.replace(b, branch=f"lambda{k}") for k, b in enumerate(out)]
    for b in out:
        a2 = b.alpha2
        if a2 > 1e-16:  # the w(|alpha|^2) relation holds on the alpha != 0 family
            ident = b.w**2 - p.lam**2 * a2 * p.n_spins**2 / (p.lam**2 * a2 + g2)
        else:
            ident = (g2 * (b.w**2 - p.n_spins**2) + 4.0 * p.eta**2) / max(g2, 1.0)
        if abs(ident) > 1e-8 * p.n_spins**2:
            raise AssertionError(f"spin-field identity violated: {ident}")
    return out


# ---------------------------------------------------------------------------
# Newton refinement


class NewtonError(RuntimeError):
    """Damped Newton failed to converge to a fixed point."""


def newton_refine(seed, p: EffectiveParams, tol: float = NEWTON_TOL,
                  max_iter: int = 200) -> SteadyBranch:
    """Damped (Gauss-)Newton on the RHS residual from ``seed``.

    For gamma = 0 the spin-norm of the seed is pinned as an extra equation:
    the flow conserves it, so the Jacobian alone is singular along that
    direction. Steps solve the augmented least-squares system; backtracking
    halves the step until the residual decreases.
    """
    y = as_state_array(seed).copy()
    if not np.all(np.isfinite(y)):
        raise ValueError("seed must be finite")
    pin = p.gamma == 0.0
    shell = spin_norm(y) if pin else 0.0
    c_scale = max(1.0, shell)

    def full_res(v):
        f = rhs_1d(v, p)
        if not pin:
            return f
        return np.append(f, v[2] ** 2 + v[3] ** 2 + v[4] ** 2 - shell)

    fval = full_res(y)
    for _ in range(max_iter):
        rhs_res = float(np.max(np.abs(fval[:5])))
        con_res = abs(fval[5]) / c_scale if pin else 0.0
        if rhs_res < tol and con_res < 1e-10:
            return SteadyBranch(state=y, branch="numeric", g_tilde=p.g_tilde, residual=rhs_res)
        jac = rhs_1d_jacobian(y, p)
        if pin:
            jac = np.vstack([jac, [0.0, 0.0, 2.0 * y[2], 2.0 * y[3], 2.0 * y[4]]])
        step = np.linalg.lstsq(jac, -fval, rcond=None)[0]
        norm0 = float(np.linalg.norm(fval))
        damping = 1.0
        for _ in range(50):
            trial = y + damping * step
            ftrial = full_res(trial)
            if np.all(np.isfinite(ftrial)) and float(np.linalg.norm(ftrial)) < norm0:
                y, fval = trial, ftrial
                break
            damping *= 0.5
        else:
            raise NewtonError("Newton stalled: no damping step decreases the residual")
    raise NewtonError(f"no convergence after {max_iter} iterations")


def _dedup(branches: list[SteadyBranch]) -> list[SteadyBranch]:
    out: list[SteadyBranch] = []
    for b in branches:
        if any(np.max(np.abs(b.state - o.state)) < DEDUP_TOL for o in out):
            continue
        out.append(b)
    return out


def numeric_branches(p: EffectiveParams, n_seeds: int = 48, seed: int = 0,
                     extra_seeds=()) -> list[SteadyBranch]:
    """Multi-seeded Newton search, for regimes without a polynomial
    reduction. Seeds sit on the physical spin shell with field values on
    the pump/loss scale."""
    rng = np.random.default_rng(seed)
    n = p.n_spins
    scale = max(1.0, p.eta / max(p.kappa, 0.1))
    found: list[SteadyBranch] = []
    seeds = [np.asarray(s, dtype=float) for s in extra_seeds]
    for _ in range(n_seeds):
        v = rng.normal(size=3)
        v *= n / np.linalg.norm(v)
        seeds.append(np.array([rng.normal() * scale, rng.normal() * scale, v[0], v[1], v[2]]))
    for s in seeds:
        try:
            br = newton_refine(s, p)
        except NewtonError:
            continue
        if abs(br.w) <= n * (1.0 + 1e-9):
            found.append(br)
    found = _dedup(found)
    found.sort(key=lambda b: (b.w, b.state[2]))
    return [dataclasses.replace(b, branch=f"numeric{k}") for k, b in enumerate(found)]


def solve_branches(p: EffectiveParams, n_seeds: int = 48, seed: int = 0) -> list[SteadyBranch]:
    """All steady branches at the given parameters, dispatching to the
    closed-form/polynomial family that applies."""
    if p.lam == 0.0:
        return quartic_w_branch(p)
    if p.delta_at == 0.0 and p.eta_i == 0.0:
        return trivial_branch(p) + lambda_poly_branch(p)
    return numeric_branches(p, n_seeds=n_seeds, seed=seed)


# ---------------------------------------------------------------------------
# Parameter sweeps


@dataclass(frozen=True)
class SweepPoint:
    g_tilde: float
    branches: list[SteadyBranch]


@dataclass(frozen=True)
class SweepResult:
    points: list[SweepPoint]
    branch_loss_events: list[tuple[float, str]]


def _match_labels(prev: list[SteadyBranch], cur: list[SteadyBranch],
                  p: EffectiveParams) -> tuple[list[SteadyBranch], list[str]]:
    """Carry branch identity from the previous sweep point by nearest
    state-space matching; recover lost branches by Newton continuation."""
    if not prev:
        return cur, []
    cur = list(cur)
    taken = [False] * len(cur)
    relabeled: dict[int, str] = {}
    lost: list[str] = []
    order = sorted(range(len(prev)), key=lambda i: prev[i].branch)
    for i in order:
        pb = prev[i]
        best, best_d = -1, np.inf
        for j, cb in enumerate(cur):
            if taken[j]:
                continue
            d = float(np.max(np.abs(cb.state - pb.state)))
            if d < best_d - 1e-15 or (abs(d - best_d) <= 1e-15 and best >= 0 and (
                    (np.sign(cb.w) == np.sign(pb.w)) and
                    (np.sign(cb.state[2]) == np.sign(pb.state[2])))):
                best, best_d = j, d
        if best >= 0 and best_d < 0.5 * max(1.0, p.n_spins):
            taken[best] = True
            relabeled[best] = pb.branch
        else:
            try:
                rec = newton_refine(pb.state, p)
            except NewtonError:
                lost.append(pb.branch)
                continue
            if any(np.max(np.abs(rec.state - cb.state)) < DEDUP_TOL for cb in cur):
                lost.append(pb.branch)
                continue
            cur.append(dataclasses.replace(rec, branch=pb.branch))
            taken.append(True)
    out = []
    used = set()
    for j, cb in enumerate(cur):
        label = relabeled.get(j, cb.branch)
        while label in used:
            label += "'"
        used.add(label)
        out.append(dataclasses.replace(cb, branch=label))
    return out, lost


def continuation_sweep(p_base: EffectiveParams, g_range: tuple[float, float],
                       steps: int, track: bool = True,
                       solver=None) -> SweepResult:
    """Solve every branch on a grid of couplings, keeping branch identity
    across the sweep by nearest-neighbor matching with Newton recovery."""
    g_lo, g_hi = float(g_range[0]), float(g_range[1])
    if g_lo == g_hi:
        gs = np.array([g_lo])
    else:
        if steps < 2:
            raise ValueError("steps must be >= 2 for a nonzero-width sweep")
        gs = np.linspace(g_lo, g_hi, int(steps))
    solver = solver or solve_branches
    points: list[SweepPoint] = []
    events: list[tuple[float, str]] = []
    prev: list[SteadyBranch] = []
    for g in gs:
        p = p_base.replace(g_tilde=float(g))
        branches = solver(p)
        if track and prev:
            branches, lost = _match_labels(prev, branches, p)
            events.extend((float(g), label) for label in lost)
        points.append(SweepPoint(g_tilde=float(g), branches=branches))
        prev = branches
    return SweepResult(points=points, branch_loss_events=events)


def write_sweep_csv(result: SweepResult, path) -> None:
    fmt = "%.17g"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("g_tilde,branch,alpha2,w,s_x,s_y,residual,stability\n")
        for pt in result.points:
            for b in pt.branches:
                fh.write(",".join([
                    fmt % pt.g_tilde, b.branch, fmt % b.alpha2, fmt % b.w,
                    fmt % b.state[2], fmt % b.state[3], fmt % b.residual, b.stability,
                ]) + "\n")


# ---------------------------------------------------------------------------
# Existence boundaries


def _bisect_boundary(exists, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Boundary of a one-sided existence region: exists(lo) and not
    exists(hi)."""
    if not exists(lo):
        raise ValueError("existence must hold at the lower bracket")
    if exists(hi):
        raise ValueError("existence must fail at the upper bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def g2_star_numeric(p_base: EffectiveParams, g_hi: float | None = None,
                    tol: float = 1e-6) -> float:
    """Upper existence boundary of the w = 0 / alpha != 0 family, by
    bisection on physical root existence. Matches the closed form
    g2* = (2 eta/N) sqrt(1 + (delta_ph/kappa)^2) as lam -> 0 and
    approaches g1* = 2 eta/N for large lam."""
    if p_base.delta_at != 0.0 or p_base.eta_i != 0.0:
        raise ValueError("g2* extraction requires delta_at = 0, eta_i = 0")
    g1 = 2.0 * p_base.eta / p_base.n_spins

    if p_base.lam == 0.0:
        def exists(g):
            return len(theta_branch(p_base.replace(g_tilde=g))) > 0
    else:
        def exists(g):
            return lambda_poly_w_roots(p_base.replace(g_tilde=g)).size > 0

    if g_hi is None:
        tp = transition_points(p_base)
        g_hi = 4.0 * (tp.g2_star if tp.g2_star is not None else g1)
    return _bisect_boundary(exists, 0.9 * g1, g_hi, tol=tol)


def region_r_interval(p_base: EffectiveParams, g_window: tuple[float, float],
                      samples: int = 200, tol: float = 1e-6) -> tuple[float, float] | None:
    """Interval of couplings where the lam = 0 quartic has four physical
    roots, refined by bisection at both edges; None when no sampled
    coupling has four."""
    gs = np.linspace(g_window[0], g_window[1], samples)
    counts = np.array([quartic_root_count(p_base.replace(g_tilde=float(g))) for g in gs])
    idx = np.flatnonzero(counts >= 4)
    if idx.size == 0:
        return None

    def four(g):
        return quartic_root_count(p_base.replace(g_tilde=float(g))) >= 4

    lo = float(gs[idx[0]])
    hi = float(gs[idx[-1]])
    if idx[0] > 0:
        a, b = float(gs[idx[0] - 1]), lo
        while b - a > tol:
            mid = 0.5 * (a + b)
            if four(mid):
                b = mid
            else:
                a = mid
        lo = 0.5 * (a + b)
    if idx[-1] < samples - 1:
        a, b = hi, float(gs[idx[-1] + 1])
        while b - a > tol:
            mid = 0.5 * (a + b)
            if four(mid):
                a = mid
            else:
                b = mid
        hi = 0.5 * (a + b)
    return (lo, hi)
