"""Command-line front end: config ingestion, sweep orchestration,
region-boundary extraction, and machine-readable output.

Exit codes: 0 success, 2 config/usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import array2d, asymptotics, stability, steady
from .dynamics import (IntegrationError, State2D, integrate, integrate_2d, rhs_1d,
                       write_bloch_csv, write_trajectory_csv, write_trajectory_jsonl)
from .params import (ConfigError, EffectiveParams, Params2D, apply_overrides,
                     effective_params_from_config, params_2d_from_config, read_config)
from .steady import NewtonError, SteadyBranch, SweepPoint, SweepResult

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_FMT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: mode, parameters, sweep window, output."""

    mode: str
    params: object
    sweep_axis: str | None
    sweep_lo: float
    sweep_hi: float
    sweep_steps: int
    output_path: str
    seed: int


@dataclass(frozen=True)
class RegionReport:
    """Boundary data for one value of the scanned parameter."""

    axis_value: float
    g1_star: float
    g2_star: float | None
    region_ii_width: float
    region_r_interval: tuple[float, float] | None
    hopf_points: list[float]
    truncated: bool = False

    def __post_init__(self):
        if self.region_ii_width < 0:
            raise ValueError("region widths must be >= 0")


# ---------------------------------------------------------------------------
# Region boundaries


def _bisect_onset(exists, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Boundary where existence switches on: not exists(lo), exists(hi)."""
    if exists(lo) or not exists(hi):
        raise ValueError("bracket does not straddle the onset")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def region_boundaries(p_base: EffectiveParams, axis: str, values,
                      g_window: tuple[float, float] | None = None,
                      tol: float = 1e-6) -> list[RegionReport]:
    """Extract the bistable-window edges (axis='lambda') or the four-root
    interval (axis='delta_at') for each grid value, by bisection on branch
    existence. Boundaries outside the scan window are flagged, never
    extrapolated."""
    reports = []
    g1_ref = 2.0 * p_base.eta / p_base.n_spins
    for v in values:
        v = float(v)
        if axis == "lambda":
            p = p_base.replace(lam=v, delta_at=0.0)

            def trivial_exists(g):
                return len(steady.trivial_branch(p.replace(g_tilde=g))) > 0

            g1 = _bisect_onset(trivial_exists, 0.25 * g1_ref, 2.0 * g1_ref, tol=tol)
            g2 = steady.g2_star_numeric(p, tol=tol)
            reports.append(RegionReport(axis_value=v, g1_star=g1, g2_star=g2,
                                        region_ii_width=max(0.0, g2 - g1),
                                        region_r_interval=None, hopf_points=[]))
        elif axis == "delta_at":
            p = p_base.replace(delta_at=v, lam=0.0)
            tp = steady.transition_points(p.replace(delta_at=0.0))
            if g_window is None:
                hi = 2.0 * (tp.g2_star if tp.g2_star is not None else g1_ref)
                window = (1e-3, hi)
            else:
                window = g_window
            interval = steady.region_r_interval(p, window, tol=tol)
            truncated = False
            if interval is not None:
                edge = 1e-9 * (window[1] - window[0])
                truncated = (interval[0] - window[0] < edge) or (window[1] - interval[1] < edge)
            width = (interval[1] - interval[0]) if interval else 0.0
            reports.append(RegionReport(axis_value=v, g1_star=tp.g1_star, g2_star=tp.g2_star,
                                        region_ii_width=max(0.0, (tp.g2_star or tp.g1_star) - tp.g1_star),
                                        region_r_interval=interval, hopf_points=[],
                                        truncated=truncated))
        else:
            raise ConfigError(f"region axis must be 'lambda' or 'delta_at', got {axis!r}")
    return reports


def _write_region_reports(reports: list[RegionReport], out_base: str) -> None:
    payload = []
    for r in reports:
        payload.append({
            "axis_value": r.axis_value, "g1_star": r.g1_star, "g2_star": r.g2_star,
            "region_ii_width": r.region_ii_width,
            "region_r_interval": list(r.region_r_interval) if r.region_r_interval else None,
            "hopf_points": r.hopf_points, "truncated": r.truncated,
        })
    with open(out_base + ".json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    with open(out_base + ".csv", "w", encoding="utf-8") as fh:
        fh.write("axis_value,g1_star,g2_star,region_ii_width,r_lo,r_hi\n")
        for r in reports:
            r_lo, r_hi = r.region_r_interval if r.region_r_interval else (math.nan, math.nan)
            fh.write(",".join(_FMT % v for v in
                              (r.axis_value, r.g1_star,
                               r.g2_star if r.g2_star is not None else math.nan,
                               r.region_ii_width, r_lo, r_hi)) + "\n")


# ---------------------------------------------------------------------------
# Sweep with stability verdicts (optionally parallel over sweep points)


def _solve_and_classify(args) -> SweepPoint:
    p_base, g = args
    p = p_base.replace(g_tilde=float(g))
    branches = steady.solve_branches(p)
    branches = stability.classify_branches(branches, p)
    return SweepPoint(g_tilde=float(g), branches=branches)


def sweep_with_stability(p_base: EffectiveParams, g_range, steps: int,
                         jobs: int = 1, verbose: bool = False) -> SweepResult:
    g_lo, g_hi = float(g_range[0]), float(g_range[1])
    gs = np.array([g_lo]) if g_lo == g_hi else np.linspace(g_lo, g_hi, int(steps))
    tasks = [(p_base, float(g)) for g in gs]
    if jobs > 1:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            raw = list(ex.map(_solve_and_classify, tasks, chunksize=chunk))
    else:
        raw = [_solve_and_classify(t) for t in tasks]
    # Branch identity is assigned sequentially so output is deterministic
    # regardless of worker scheduling.
    points: list[SweepPoint] = []
    events: list[tuple[float, str]] = []
    prev: list[SteadyBranch] = []
    for pt in raw:
        branches = pt.branches
        if prev:
            p = p_base.replace(g_tilde=pt.g_tilde)
            branches, lost = steady._match_labels(prev, branches, p)
            branches = [b if b.stability != steady.UNKNOWN else
                        b.with_stability(stability.classify(b, p)) for b in branches]
            events.extend((pt.g_tilde, label) for label in lost)
        points.append(SweepPoint(g_tilde=pt.g_tilde, branches=branches))
        prev = branches
        if verbose:
            n_stable = sum(1 for b in branches if b.stability == steady.STABLE)
            print(f"g_tilde={pt.g_tilde:.6g}: {len(branches)} branches, {n_stable} stable")
    return SweepResult(points=points, branch_loss_events=events)


# ---------------------------------------------------------------------------
# Subcommand handlers


def _effective_params(cfg: dict) -> EffectiveParams:
    return effective_params_from_config(cfg)


def _sweep_window(cfg: dict, args, default=None):
    lo = args.sweep_lo if args.sweep_lo is not None else cfg.get("sweep_lo")
    hi = args.sweep_hi if args.sweep_hi is not None else cfg.get("sweep_hi")
    steps = args.steps if args.steps is not None else cfg.get("sweep_steps")
    if lo is None or hi is None:
        if default is None:
            raise ConfigError("sweep window required: set sweep_lo/sweep_hi "
                              "in the config or pass --sweep-lo/--sweep-hi")
        lo, hi = default
    if steps is None:
        steps = 101
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError("sweep range must be finite")
    if steps < 1:
        raise ConfigError("sweep_steps must be >= 1")
    return float(lo), float(hi), int(steps)


def _params_json(p: EffectiveParams) -> dict:
    return {"delta_at": p.delta_at, "delta_ph": p.delta_ph, "lambda": p.lam,
            "g_tilde": p.g_tilde, "kappa": p.kappa, "gamma": p.gamma,
            "eta_r": p.eta_r, "eta_i": p.eta_i, "eta": p.eta, "n_spins": p.n_spins}


def cmd_derive_params(args, cfg) -> int:
    p = _effective_params(cfg)
    payload = _params_json(p)
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _initial_state(cfg: dict, p: EffectiveParams, seed: int) -> np.ndarray:
    keys = ("state0_alpha_r", "state0_alpha_i", "state0_s_x", "state0_s_y", "state0_w")
    if any(k in cfg for k in keys):
        return np.array([cfg.get(k, 0.0) for k in keys], dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=3)
    v *= p.n_spins / np.linalg.norm(v)
    return np.array([0.1 * rng.normal(), 0.1 * rng.normal(), v[0], v[1], v[2]])


def cmd_evolve(args, cfg) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    t_end = args.t_end if args.t_end is not None else cfg.get("t_end", 100.0)
    if "g_tilde_a" in cfg:
        p2 = params_2d_from_config(cfg)
        rng = np.random.default_rng(seed)
        w0 = rng.uniform(-1.0, 1.0, size=(p2.n_rows, p2.n_cols))
        phase = rng.uniform(0.0, 2.0 * math.pi, size=(p2.n_rows, p2.n_cols))
        s0 = 0.5 * np.sqrt(1.0 - w0**2) * np.exp(1j * phase)
        state0 = State2D(alpha=np.zeros(p2.n_rows, complex),
                         beta=np.zeros(p2.n_cols, complex), s=s0, w=w0)
        traj = integrate_2d(state0, p2, t_end)
        write_trajectory_jsonl(traj, args.out)
        print(f"wrote {args.out}: settled={traj.settled} "
              f"drift={traj.conservation_drift}")
        return EXIT_OK
    p = _effective_params(cfg)
    y0 = _initial_state(cfg, p, seed)
    traj = integrate(y0, p, t_end)
    write_trajectory_csv(traj, args.out)
    if args.bloch:
        write_bloch_csv(traj, args.bloch, p.n_spins)
    print(f"wrote {args.out}: settled={traj.settled} drift={traj.conservation_drift} "
          f"final_rhs={traj.rhs_norm_final:.3e}")
    return EXIT_OK


def _transition_payload(p: EffectiveParams) -> dict:
    payload: dict = {"g1_star": None, "g2_star": None}
    if p.delta_at == 0.0:
        tp = steady.transition_points(p)
        payload["g1_star"] = tp.g1_star
        if p.lam == 0.0:
            payload["g2_star"] = tp.g2_star
        elif p.eta_i == 0.0:
            payload["g2_star"] = steady.g2_star_numeric(p)
    return payload


def cmd_steady(args, cfg) -> int:
    p = _effective_params(cfg)
    branches = stability.classify_branches(steady.solve_branches(p), p)
    result = SweepResult(points=[SweepPoint(g_tilde=p.g_tilde, branches=branches)],
                         branch_loss_events=[])
    steady.write_sweep_csv(result, args.out)
    payload = _transition_payload(p)
    payload["n_branches"] = len(branches)
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    for b in branches:
        print(f"{b.branch}: w={b.w:+.6g} |alpha|^2={b.alpha2:.6g} {b.stability}")
    return EXIT_OK


def cmd_sweep(args, cfg) -> int:
    p = _effective_params(cfg)
    axis = (args.axis or cfg.get("sweep_axis") or "g_tilde").strip()
    jobs = _resolve_jobs(args)
    if axis in ("lambda", "delta_at"):
        lo, hi, steps = _sweep_window(cfg, args)
        values = np.linspace(lo, hi, steps)
        reports = region_boundaries(p, axis, values)
        out_base = args.out[:-4] if args.out.endswith(".csv") else args.out
        _write_region_reports(reports, out_base)
        print(f"wrote {out_base}.json and {out_base}.csv ({len(reports)} grid points)")
        return EXIT_OK
    if axis != "g_tilde":
        raise ConfigError(f"unsupported sweep axis {axis!r}")
    tp_default = None
    if p.delta_at == 0.0 and p.eta > 0:
        g1 = 2.0 * p.eta / p.n_spins
        tp_default = (0.0, 2.0 * g1)
    lo, hi, steps = _sweep_window(cfg, args, default=tp_default)
    result = sweep_with_stability(p, (lo, hi), steps, jobs=jobs, verbose=args.verbose)
    steady.write_sweep_csv(result, args.out)
    payload = _transition_payload(p)
    payload["n_points"] = len(result.points)
    payload["branch_loss_events"] = [[g, label] for g, label in result.branch_loss_events]
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out} ({len(result.points)} sweep points)")
    return EXIT_OK


def cmd_stability(args, cfg) -> int:
    p = _effective_params(cfg)
    lo, hi, steps = _sweep_window(cfg, args)
    result = sweep_with_stability(p, (lo, hi), steps, jobs=_resolve_jobs(args),
                                  verbose=args.verbose)
    rows = []
    for pt in result.points:
        pp = p.replace(g_tilde=pt.g_tilde)
        for b in pt.branches:
            spec = stability.spectrum(b.state, pp)
            rows.append((pt.g_tilde, b.branch, spec.eigenvalues, b.stability))
    stability.write_stability_csv(rows, args.out)
    hopf = stability.hopf_scan(p, (lo, hi), steps)
    stability.write_hopf_json(hopf, args.out + ".hopf.json")
    print(f"wrote {args.out} and {args.out}.hopf.json ({len(hopf)} Hopf candidates)")
    return EXIT_OK


def cmd_asymptotics(args, cfg) -> int:
    p = _effective_params(cfg)
    if p.lam == 0.0 or p.delta_at != 0.0 or p.eta_i != 0.0:
        raise ConfigError("asymptotics mode requires lambda != 0, delta_at = 0, eta_i = 0")
    g1 = asymptotics.g1_star(p.eta, p.n_spins)
    lo, hi, steps = _sweep_window(cfg, args, default=(0.95 * g1, 1.05 * g1))
    rows = []
    for g in np.linspace(lo, hi, steps):
        pg = p.replace(g_tilde=float(g))
        if g >= g1:
            triv = steady.trivial_branch(pg)
            w_exact = max((abs(b.w) for b in triv), default=math.nan)
            a2_exact = 0.0
        else:
            roots = steady.lambda_poly_branch(pg)
            nontriv = [b for b in roots if b.alpha2 > 1e-18]
            nontriv.sort(key=lambda b: abs(b.w))
            pair = nontriv[:2]
            w_exact = float(np.mean([abs(b.w) for b in pair])) if pair else math.nan
            a2_exact = float(np.mean([b.alpha2 for b in pair])) if pair else math.nan
        rows.append((g, w_exact, asymptotics.w0(float(g), p.eta, p.n_spins)[0],
                     a2_exact, asymptotics.alpha2_asymptotic(float(g), p.eta, p.n_spins, p.lam)))
    asymptotics.write_scaling_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} samples around g1*={g1:.6g})")
    return EXIT_OK


def _cluster_params_json(r) -> dict:
    return {"alpha": [r.alpha.real, r.alpha.imag], "beta": [r.beta.real, r.beta.imag],
            "s1": [r.s1.real, r.s1.imag], "s2": [r.s2.real, r.s2.imag],
            "w1": r.w1, "w2": r.w2, "residual": r.residual}


def random_cluster_params(rng: np.random.Generator, gamma_zero_fraction: float = 0.2) -> Params2D:
    """Random parameter draw for the sublattice-symmetry study; mixes
    gamma = 0 (conservative) and gamma > 0 (decay-enabled) draws."""
    gamma = 0.0 if rng.uniform() < gamma_zero_fraction else float(rng.uniform(0.02, 1.0))
    return Params2D(
        g_tilde_a=float(rng.uniform(0.3, 2.5)), g_tilde_b=float(rng.uniform(0.3, 2.5)),
        delta_ph_a=float(rng.uniform(-1.0, 1.0)), delta_ph_b=float(rng.uniform(-1.0, 1.0)),
        delta_at=float(rng.uniform(-1.0, 1.0)), lam=float(rng.uniform(-1.0, 1.0)),
        kappa=float(rng.uniform(0.2, 1.0)), gamma=gamma,
        eta=complex(rng.uniform(0.3, 1.5) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))),
        n_rows=int(rng.integers(2, 7)), n_cols=int(rng.integers(2, 7)),
    )


def cmd_cluster2d(args, cfg) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    draws = args.draws if args.draws is not None else cfg.get("draws", 0)
    n_seeds = cfg.get("cluster_seeds", 64)
    if draws:
        rng = np.random.default_rng(seed)
        max_dw = max_ds = 0.0
        n_roots = 0
        with open(args.out, "w", encoding="utf-8") as fh:
            for k in range(int(draws)):
                p2 = random_cluster_params(rng)
                res = array2d.cluster_2d(p2, n_seeds=8, seed=seed + k)
                for r in res.roots:
                    n_roots += 1
                    max_dw = max(max_dw, r.w_asymmetry)
                    max_ds = max(max_ds, r.s_asymmetry)
                    fh.write(json.dumps({"draw": k, **_cluster_params_json(r)}) + "\n")
        print(f"{draws} draws, {n_roots} converged roots: "
              f"max|w1-w2|={max_dw:.3e} max|s1-s2|={max_ds:.3e}")
        return EXIT_OK
    p2 = params_2d_from_config(cfg)
    res = array2d.cluster_2d(p2, n_seeds=n_seeds, seed=seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in res.roots:
            fh.write(json.dumps(_cluster_params_json(r)) + "\n")
    print(f"{len(res.roots)} distinct roots ({res.n_converged} converged seeds, "
          f"{res.n_failed} failed): max|w1-w2|={res.max_w_asymmetry:.3e} "
          f"max|s1-s2|={res.max_s_asymmetry:.3e}")
    return EXIT_OK


def cmd_homog2d(args, cfg) -> int:
    p2 = params_2d_from_config(cfg)
    res = array2d.homogeneous_2d(p2)
    payload = {
        "g1_star": res.g1_star,
        "alpha": [res.alpha.real, res.alpha.imag] if res.alpha is not None else None,
        "beta": [res.beta.real, res.beta.imag] if res.beta is not None else None,
        "s": [res.s.real, res.s.imag] if res.s is not None else None,
        "w": res.w, "s_abs2": res.s_abs2,
    }
    text = json.dumps(payload, indent=2) + "\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _check_sweep_csv(rows: list[dict], p: EffectiveParams) -> list[str]:
    problems = []
    cache: dict[float, list[SteadyBranch]] = {}
    n2 = p.n_spins**2
    for k, row in enumerate(rows):
        g = float(row["g_tilde"])
        state_norm = float(row["s_x"])**2 + float(row["s_y"])**2 + float(row["w"])**2
        if p.gamma == 0.0 and abs(state_norm + float(row["alpha2"]) * 0.0 - n2) > 1e-8 * n2:
            problems.append(f"row {k}: spin sum rule violated by {state_norm - n2:.3e}")
        if float(row["residual"]) > steady.RESIDUAL_ACCEPT:
            problems.append(f"row {k}: stored residual {row['residual']} too large")
        if g not in cache:
            cache[g] = steady.solve_branches(p.replace(g_tilde=g))
        match = min((float(max(abs(b.w - float(row["w"])),
                                abs(b.state[2] - float(row["s_x"])),
                                abs(b.state[3] - float(row["s_y"]))))
                     for b in cache[g]), default=math.inf)
        if match > 1e-6:
            problems.append(f"row {k}: no recomputed branch within 1e-6 (best {match:.3e})")
    return problems


def _check_trajectory_csv(rows: list[dict], p: EffectiveParams) -> list[str]:
    problems = []
    if p.gamma != 0.0:
        return problems
    s2 = [float(r["s_x"])**2 + float(r["s_y"])**2 + float(r["w"])**2 for r in rows]
    drift = max(abs(v - s2[0]) for v in s2)
    if drift > 1e-8 * max(1.0, s2[0]):
        problems.append(f"conservation drift {drift:.3e} exceeds 1e-8 relative")
    return problems


def cmd_check(args, cfg) -> int:
    p = _effective_params(cfg)
    with open(args.data, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [dict(zip(header, line.strip().split(","))) for line in fh if line.strip()]
    if header[0] == "g_tilde":
        problems = _check_sweep_csv(rows, p)
    elif header[0] == "t":
        problems = _check_trajectory_csv(rows, p)
    else:
        print(f"unrecognized header: {header}", file=sys.stderr)
        return EXIT_CONFIG
    if problems:
        for msg in problems:
            print(msg, file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{args.data}: {len(rows)} rows ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _resolve_jobs(args) -> int:
    if getattr(args, "jobs", None):
        return max(1, args.jobs)
    env = os.environ.get("CAVITY_MF_JOBS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _add_common(sub, out_default: str):
    sub.add_argument("config", help="flat key = value parameter file")
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override a config key (repeatable)")
    sub.add_argument("--out", "-o", default=out_default, help="output path")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default: CAVITY_MF_JOBS or 1)")
    sub.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-mf",
        description="Mean-field steady states, stability and limit cycles of a "
                    "pumped lossy cavity array.")
    subs = parser.add_subparsers(dest="mode", required=True)

    sp = subs.add_parser("derive-params", help="reduce raw three-level constants")
    _add_common(sp, out_default="")
    sp.set_defaults(handler=cmd_derive_params)

    sp = subs.add_parser("evolve", help="integrate the equations of motion")
    _add_common(sp, out_default="trajectory.csv")
    sp.add_argument("--t-end", type=float, default=None)
    sp.add_argument("--bloch", default=None, help="also write a Bloch-sphere CSV")
    sp.set_defaults(handler=cmd_evolve)

    sp = subs.add_parser("steady", help="steady branches at fixed parameters")
    _add_common(sp, out_default="steady.csv")
    sp.set_defaults(handler=cmd_steady)

    sp = subs.add_parser("sweep", help="branch sweep or region-boundary grid")
    _add_common(sp, out_default="sweep.csv")
    sp.add_argument("--axis", default=None, help="g_tilde (default), lambda, delta_at")
    sp.add_argument("--sweep-lo", type=float, default=None)
    sp.add_argument("--sweep-hi", type=float, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.set_defaults(handler=cmd_sweep)

    sp = subs.add_parser("stability", help="eigenvalue report and Hopf scan")
    _add_common(sp, out_default="stability.csv")
    sp.add_argument("--sweep-lo", type=float, default=None)
    sp.add_argument("--sweep-hi", type=float, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.set_defaults(handler=cmd_stability)

    sp = subs.add_parser("asymptotics", help="large-lambda scaling comparison")
    _add_common(sp, out_default="scaling.csv")
    sp.add_argument("--sweep-lo", type=float, default=None)
    sp.add_argument("--sweep-hi", type=float, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.set_defaults(handler=cmd_asymptotics)

    sp = subs.add_parser("cluster2d", help="two-site cluster fixed points")
    _add_common(sp, out_default="cluster.jsonl")
    sp.add_argument("--draws", type=int, default=None,
                    help="random parameter draws for the symmetry study")
    sp.set_defaults(handler=cmd_cluster2d)

    sp = subs.add_parser("homog2d", help="homogeneous-array transition point")
    _add_common(sp, out_default="homog2d.json")
    sp.set_defaults(handler=cmd_homog2d)

    sp = subs.add_parser("check", help="re-validate an emitted CSV against its config")
    sp.add_argument("data", help="sweep or trajectory CSV to validate")
    sp.add_argument("--config", required=True, dest="config")
    sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sp.set_defaults(handler=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = read_config(args.config)
        cfg = apply_overrides(cfg, args.set)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.handler(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, NewtonError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
