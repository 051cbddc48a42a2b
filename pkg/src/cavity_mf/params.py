"""Parameter containers and the reduction to the effective nonlinear
Jaynes-Cummings constants.

All frequencies are dimensionless, in units of a reference rate chosen per
run (configs carry a ``unit`` tag for bookkeeping); nothing is rescaled
implicitly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

__all__ = [
    "ConfigError",
    "EffectiveParams",
    "Params2D",
    "PhysicalParams",
    "derive_effective_params",
    "effective_params_from_config",
    "params_2d_from_config",
    "parse_config",
    "read_config",
]


def _check_finite(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Raw three-level-atom constants before the excited state is eliminated.

    ``delta_e`` and ``delta_s`` are the detunings of |e> and |s> in the
    rotating frame, ``delta_cavity`` the cavity detuning from the pump frame
    frequency ``omega_aux`` (kept only for provenance).
    """

    g: float
    omega_rabi: float
    delta_e: float
    delta_s: float
    delta_cavity: float
    omega_aux: float = 0.0

    def __post_init__(self):
        _check_finite(self, ("g", "omega_rabi", "delta_e", "delta_s", "delta_cavity", "omega_aux"))


@dataclass(frozen=True)
class EffectiveParams:
    """Constants of the reduced pumped single-mode model.

    ``lam`` is the dispersive photon-spin nonlinearity, ``g_tilde`` the
    exchange coupling, ``n_spins`` the collective spin length (a real number;
    per-spin work uses 1).
    """

    delta_at: float = 0.0
    delta_ph: float = 0.0
    lam: float = 0.0
    g_tilde: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    eta_r: float = 0.0
    eta_i: float = 0.0
    n_spins: float = 1.0

    def __post_init__(self):
        _check_finite(self, ("delta_at", "delta_ph", "lam", "g_tilde", "kappa",
                             "gamma", "eta_r", "eta_i", "n_spins"))
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.n_spins <= 0:
            raise ValueError(f"n_spins must be > 0, got {self.n_spins}")

    @property
    def eta(self) -> float:
        """Pump amplitude |eta|; eta^2 == eta_r^2 + eta_i^2."""
        return math.hypot(self.eta_r, self.eta_i)

    @property
    def eta_complex(self) -> complex:
        return complex(self.eta_r, self.eta_i)

    def replace(self, **changes) -> "EffectiveParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Params2D:
    """Parameters of the two-dimensional array: row modes couple with
    ``g_tilde_a``, column modes with ``g_tilde_b``; spins are normalized
    per site (length 1)."""

    g_tilde_a: float
    g_tilde_b: float
    delta_ph_a: float
    delta_ph_b: float
    delta_at: float = 0.0
    lam: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    eta: complex = 0j
    n_rows: int = 1
    n_cols: int = 1

    def __post_init__(self):
        _check_finite(self, ("g_tilde_a", "g_tilde_b", "delta_ph_a", "delta_ph_b",
                             "delta_at", "lam", "kappa", "gamma"))
        if not (math.isfinite(self.eta.real) and math.isfinite(self.eta.imag)):
            raise ValueError("eta must be finite")
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"array shape must be >= 1x1, got {self.n_rows}x{self.n_cols}")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be >= 0")

    def replace(self, **changes) -> "Params2D":
        return dataclasses.replace(self, **changes)


def derive_effective_params(phys: PhysicalParams, kappa: float = 0.0, gamma: float = 0.0,
                            eta: complex = 0j, n_spins: float = 1.0) -> EffectiveParams:
    """Adiabatically eliminate the excited state.

    delta_at = delta_s - omega_rabi^2/delta_e
    delta_ph = delta_cavity - g^2/(2 delta_e)
    lam      = -g^2/(2 delta_e)
    g_tilde  = -g*omega_rabi/delta_e

    Raises
    ------
    ValueError
        If ``delta_e`` is zero (the elimination divides by it).
    """
    if phys.delta_e == 0:
        raise ValueError("adiabatic elimination singular: delta_e = 0")
    eta = complex(eta)
    return EffectiveParams(
        delta_at=phys.delta_s - phys.omega_rabi**2 / phys.delta_e,
        delta_ph=phys.delta_cavity - phys.g**2 / (2.0 * phys.delta_e),
        lam=-phys.g**2 / (2.0 * phys.delta_e),
        g_tilde=-phys.g * phys.omega_rabi / phys.delta_e,
        kappa=kappa,
        gamma=gamma,
        eta_r=eta.real,
        eta_i=eta.imag,
        n_spins=n_spins,
    )


# ---------------------------------------------------------------------------
# Flat key = value config files


class ConfigError(ValueError):
    """Malformed config file (unknown key, bad value, missing requirement)."""


_PHYSICAL_KEYS = ("g", "omega_rabi", "delta_e", "delta_s", "delta_cavity", "omega_aux")
_SHARED_KEYS = ("kappa", "gamma", "eta_r", "eta_i", "n_spins")
_OVERRIDE_KEYS = ("delta_at", "delta_ph", "lambda", "g_tilde")
_KEYS_2D = ("g_tilde_a", "g_tilde_b", "delta_ph_a", "delta_ph_b", "n_rows", "n_cols")
_RUN_KEYS = ("sweep_axis", "sweep_lo", "sweep_hi", "sweep_steps", "seed", "unit",
             "t_end", "t_transient", "t_measure", "draws", "cluster_seeds",
             "state0_alpha_r", "state0_alpha_i", "state0_s_x", "state0_s_y", "state0_w")

_INT_KEYS = frozenset({"n_rows", "n_cols", "sweep_steps", "seed", "draws", "cluster_seeds"})
_STR_KEYS = frozenset({"sweep_axis", "unit"})
_ALL_KEYS = frozenset(_PHYSICAL_KEYS + _SHARED_KEYS + _OVERRIDE_KEYS + _KEYS_2D + _RUN_KEYS)


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in _STR_KEYS:
            out[key] = value
            continue
        try:
            out[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def read_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def apply_overrides(cfg: dict, assignments: list[str]) -> dict:
    """Apply repeated ``--set key=value`` style overrides on a parsed config."""
    merged = dict(cfg)
    for item in assignments:
        merged.update(parse_config(item, source=f"--set {item!r}"))
    return merged


def effective_params_from_config(cfg: dict) -> EffectiveParams:
    """Build EffectiveParams from a parsed config.

    If physical-level keys are present the effective constants are derived
    first; the per-constant keys delta_at/delta_ph/lambda/g_tilde then
    override (bypass) the derivation.
    """
    eta = complex(cfg.get("eta_r", 0.0), cfg.get("eta_i", 0.0))
    kappa = cfg.get("kappa", 0.0)
    gamma = cfg.get("gamma", 0.0)
    n_spins = cfg.get("n_spins", 1.0)
    if any(k in cfg for k in ("g", "omega_rabi", "delta_e", "delta_s", "delta_cavity")):
        if "delta_e" not in cfg:
            raise ConfigError("physical-level config requires delta_e")
        phys = PhysicalParams(
            g=cfg.get("g", 0.0),
            omega_rabi=cfg.get("omega_rabi", 0.0),
            delta_e=cfg["delta_e"],
            delta_s=cfg.get("delta_s", 0.0),
            delta_cavity=cfg.get("delta_cavity", 0.0),
            omega_aux=cfg.get("omega_aux", 0.0),
        )
        if phys.delta_e == 0:
            raise ConfigError("delta_e = 0: adiabatic elimination singular")
        base = derive_effective_params(phys, kappa=kappa, gamma=gamma, eta=eta,
                                       n_spins=n_spins)
    else:
        base = EffectiveParams(kappa=kappa, gamma=gamma, eta_r=eta.real,
                               eta_i=eta.imag, n_spins=n_spins)
    changes = {}
    for key, attr in (("delta_at", "delta_at"), ("delta_ph", "delta_ph"),
                      ("lambda", "lam"), ("g_tilde", "g_tilde")):
        if key in cfg:
            changes[attr] = cfg[key]
    return base.replace(**changes) if changes else base


def params_2d_from_config(cfg: dict) -> Params2D:
    missing = [k for k in ("g_tilde_a", "g_tilde_b", "delta_ph_a", "delta_ph_b") if k not in cfg]
    if missing:
        raise ConfigError(f"2D run requires keys: {', '.join(missing)}")
    return Params2D(
        g_tilde_a=cfg["g_tilde_a"],
        g_tilde_b=cfg["g_tilde_b"],
        delta_ph_a=cfg["delta_ph_a"],
        delta_ph_b=cfg["delta_ph_b"],
        delta_at=cfg.get("delta_at", 0.0),
        lam=cfg.get("lambda", 0.0),
        kappa=cfg.get("kappa", 0.0),
        gamma=cfg.get("gamma", 0.0),
        eta=complex(cfg.get("eta_r", 0.0), cfg.get("eta_i", 0.0)),
        n_rows=cfg.get("n_rows", 1),
        n_cols=cfg.get("n_cols", 1),
    )
