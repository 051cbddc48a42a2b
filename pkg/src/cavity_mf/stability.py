"""Linear stability of the steady branches, Hopf scanning, and limit-cycle
characterization by long-time integration.

The 5x5 stability matrix is the analytic Jacobian of the mean-field RHS;
for gamma = 0 spin conservation forces one exact zero eigenvalue at every
fixed point, which is identified by magnitude and excluded before reading
off the verdict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import steady
from .dynamics import as_state_array, integrate, rhs_1d_jacobian, spin_norm
from .params import EffectiveParams
from .steady import MARGINAL, STABLE, UNKNOWN, UNSTABLE, NewtonError, SteadyBranch

__all__ = [
    "HopfPoint",
    "LimitCycle",
    "Spectrum",
    "classify",
    "classify_branches",
    "find_limit_cycle",
    "hopf_scan",
    "jacobian",
    "spectrum",
    "write_hopf_json",
    "write_stability_csv",
]

RE_TOL = 1e-8
ZERO_MODE_REL = 1e-8
HOPF_IM_TOL = 1e-6


def jacobian(state, p: EffectiveParams) -> np.ndarray:
    """Stability matrix at a (steady) state; equals the analytic Jacobian
    of the RHS, including the gamma decay diagonal when gamma > 0."""
    return rhs_1d_jacobian(state, p)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # 5 complex values
    zero_mode_index: int

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def spectrum(state, p: EffectiveParams) -> Spectrum:
    ev = np.linalg.eigvals(jacobian(state, p))
    return Spectrum(eigenvalues=ev, zero_mode_index=int(np.argmin(np.abs(ev))))


def _relevant_eigenvalues(state, p: EffectiveParams) -> np.ndarray:
    spec = spectrum(state, p)
    ev = spec.eigenvalues
    if p.gamma == 0.0:
        rho = spec.spectral_radius
        smallest = abs(ev[spec.zero_mode_index])
        if rho == 0.0 or smallest <= ZERO_MODE_REL * rho:
            ev = np.delete(ev, spec.zero_mode_index)
    return ev


def classify(branch, p: EffectiveParams) -> str:
    """Stable / unstable / marginal verdict for a branch or raw state.

    The conserved-spin zero mode is excluded for gamma = 0; the verdict
    reads the remaining real parts against a +-1e-8 band.
    """
    state = branch.state if isinstance(branch, SteadyBranch) else as_state_array(branch)
    try:
        ev = _relevant_eigenvalues(state, p)
    except np.linalg.LinAlgError:
        return UNKNOWN
    re_max = float(np.max(ev.real)) if ev.size else 0.0
    if re_max > RE_TOL:
        return UNSTABLE
    if re_max < -RE_TOL:
        return STABLE
    return MARGINAL


def classify_branches(branches: list[SteadyBranch], p: EffectiveParams) -> list[SteadyBranch]:
    return [b.with_stability(classify(b, p)) for b in branches]


# ---------------------------------------------------------------------------
# Hopf scanning


@dataclass(frozen=True)
class HopfPoint:
    g_tilde: float
    im_pair: float  # |Im| of the crossing conjugate pair
    branch: str


def _leading_eig(state, p: EffectiveParams) -> complex:
    ev = _relevant_eigenvalues(state, p)
    if ev.size == 0:
        return 0j
    return complex(ev[np.argmax(ev.real)])


def _bisect_hopf(p_base: EffectiveParams, g_lo: float, state_lo: np.ndarray,
                 g_hi: float, tol: float) -> tuple[float, float] | None:
    lead_lo = _leading_eig(state_lo, p_base.replace(g_tilde=g_lo))
    sign_lo = np.sign(lead_lo.real)
    state = state_lo
    while g_hi - g_lo > tol:
        g_mid = 0.5 * (g_lo + g_hi)
        p = p_base.replace(g_tilde=g_mid)
        try:
            br = steady.newton_refine(state, p)
        except NewtonError:
            return None
        lead = _leading_eig(br.state, p)
        if np.sign(lead.real) == sign_lo:
            g_lo, state = g_mid, br.state
        else:
            g_hi = g_mid
    p = p_base.replace(g_tilde=0.5 * (g_lo + g_hi))
    try:
        br = steady.newton_refine(state, p)
    except NewtonError:
        return None
    lead = _leading_eig(br.state, p)
    if abs(lead.imag) <= HOPF_IM_TOL:
        return None
    return 0.5 * (g_lo + g_hi), abs(lead.imag)


def hopf_scan(p_base: EffectiveParams, g_range: tuple[float, float],
              steps: int, tol: float = 1e-6) -> list[HopfPoint]:
    """Track each branch's leading eigenvalue pair across the coupling and
    bisect real-part sign changes with a genuinely complex pair."""
    g_lo, g_hi = float(g_range[0]), float(g_range[1])
    if steps < 3 or g_lo >= g_hi:
        return []
    sweep = steady.continuation_sweep(p_base, (g_lo, g_hi), steps)
    out: list[HopfPoint] = []
    for prev_pt, cur_pt in zip(sweep.points[:-1], sweep.points[1:]):
        prev = {b.branch: b for b in prev_pt.branches}
        for b in cur_pt.branches:
            pb = prev.get(b.branch)
            if pb is None:
                continue
            lead0 = _leading_eig(pb.state, p_base.replace(g_tilde=prev_pt.g_tilde))
            lead1 = _leading_eig(b.state, p_base.replace(g_tilde=cur_pt.g_tilde))
            if np.sign(lead0.real) == np.sign(lead1.real):
                continue
            if min(abs(lead0.imag), abs(lead1.imag)) <= HOPF_IM_TOL:
                continue
            hit = _bisect_hopf(p_base, prev_pt.g_tilde, pb.state, cur_pt.g_tilde, tol)
            if hit is not None:
                out.append(HopfPoint(g_tilde=hit[0], im_pair=hit[1], branch=b.branch))
    out.sort(key=lambda h: (h.g_tilde, h.branch))
    return out


# ---------------------------------------------------------------------------
# Limit cycles


@dataclass(frozen=True)
class LimitCycle:
    """A periodic orbit detected from the inversion signal w(t).

    ``period`` is the mean spacing of matched successive maxima (quadratic
    sub-sample interpolation); ``converged`` requires the matched peak
    amplitudes to agree within 1% of the oscillation range and the spacings
    within 10%."""

    period: float | None
    w_min: float
    w_max: float
    times: np.ndarray
    states: np.ndarray
    converged: bool
    peak_times: np.ndarray
    peak_values: np.ndarray
    period_spread: float

    @property
    def amplitude(self) -> float:
        return self.w_max - self.w_min


def _interpolated_peaks(times: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dt = times[1] - times[0]
    pt, pv = [], []
    for i in range(1, len(w) - 1):
        if w[i] >= w[i - 1] and w[i] > w[i + 1]:
            y1, y2, y3 = w[i - 1], w[i], w[i + 1]
            denom = y1 - 2.0 * y2 + y3
            shift = 0.5 * (y1 - y3) / denom if denom != 0.0 else 0.0
            pt.append(times[i] + shift * dt)
            pv.append(y2 - 0.25 * (y1 - y3) * shift)
    return np.array(pt), np.array(pv)


def find_limit_cycle(p: EffectiveParams, state0, t_transient: float, t_measure: float,
                     n_samples: int = 8192, rel_tol: float = 1e-11,
                     abs_tol: float = 1e-13) -> LimitCycle | None:
    """Integrate through the transient, then detect periodicity in w(t).

    Returns None if the trajectory settles to a fixed point. A non-periodic
    oscillation (peak spacings varying over 10%) is returned with
    ``converged = False`` as a diagnostic.
    """
    if t_measure <= 0:
        raise ValueError("t_measure must be > 0")
    y = as_state_array(state0)
    if t_transient > 0:
        y = integrate(y, p, t_transient, rel_tol=rel_tol, abs_tol=abs_tol,
                      n_samples=512).final_state
    traj = integrate(y, p, t_measure, rel_tol=rel_tol, abs_tol=abs_tol,
                     n_samples=n_samples)
    if traj.settled:
        return None
    w = traj.states[:, 4]
    w_min, w_max = float(w.min()), float(w.max())
    span = w_max - w_min
    peak_t, peak_v = _interpolated_peaks(traj.times, w)
    if peak_t.size < 3 or span <= 1e-6:
        return LimitCycle(period=None, w_min=w_min, w_max=w_max, times=traj.times,
                          states=traj.states, converged=False, peak_times=peak_t,
                          peak_values=peak_v, period_spread=float("inf"))
    # Match maxima of the same kind: multi-humped cycles alternate peak
    # heights, so the period is set by recurrences of the tallest one.
    # Sub-sample interpolation keeps same-kind heights repeatable to
    # ~1e-6 of the span, well inside the class tolerance.
    top = peak_v.max()
    sel = peak_v >= top - max(1e-4 * span, 1e-12)
    if np.sum(sel) < 3:
        sel = np.ones_like(sel, dtype=bool)
    t_sel, v_sel = peak_t[sel], peak_v[sel]
    spacings = np.diff(t_sel)
    period = float(spacings.mean())
    spread = float(spacings.std() / period) if period > 0 else float("inf")
    last = v_sel[-5:]
    amps_agree = (last.max() - last.min()) <= 0.01 * span
    converged = spread <= 0.10 and amps_agree and period > 0
    mask = traj.times >= t_sel[-1] - period if converged else slice(None)
    return LimitCycle(period=period, w_min=w_min, w_max=w_max,
                      times=traj.times[mask], states=traj.states[mask],
                      converged=converged, peak_times=t_sel, peak_values=v_sel,
                      period_spread=spread)


# ---------------------------------------------------------------------------
# Reports


def write_stability_csv(rows: list[tuple[float, str, np.ndarray, str]], path) -> None:
    """Rows of (g_tilde, branch, eigenvalues, verdict)."""
    fmt = "%.17g"
    with open(path, "w", encoding="utf-8") as fh:
        head = ",".join(["g_tilde", "branch"] + [f"re_y{k}" for k in range(1, 6)]
                        + [f"im_y{k}" for k in range(1, 6)] + ["verdict"])
        fh.write(head + "\n")
        for g, label, ev, verdict in rows:
            ev = np.asarray(ev)
            fh.write(",".join([fmt % g, label] + [fmt % v for v in ev.real]
                              + [fmt % v for v in ev.imag] + [verdict]) + "\n")


def write_hopf_json(points: list[HopfPoint], path) -> None:
    payload = [{"g_tilde": h.g_tilde, "im_pair": h.im_pair, "branch": h.branch}
               for h in points]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def orbit_spin_drift(cycle: LimitCycle, n_spins: float) -> float:
    """Max |S^2 - N^2| over the sampled orbit (gamma = 0 sanity check)."""
    s2 = np.array([spin_norm(s) for s in cycle.states])
    return float(np.max(np.abs(s2 - n_spins**2)))
