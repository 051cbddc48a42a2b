import numpy as np
import pytest

from cavity_mf import EffectiveParams


@pytest.fixture
def fig3_params() -> EffectiveParams:
    # Bistability base point: eta_i = 0, delta_ph/eta_r = 0.5, kappa/eta_r = 0.5
    return EffectiveParams(delta_ph=0.5, kappa=0.5, eta_r=1.0, n_spins=1.0)


def random_state_on_sphere(rng: np.random.Generator, n_spins: float = 1.0,
                           alpha_scale: float = 0.3) -> np.ndarray:
    v = rng.normal(size=3)
    v *= n_spins / np.linalg.norm(v)
    return np.array([alpha_scale * rng.normal(), alpha_scale * rng.normal(),
                     v[0], v[1], v[2]])


def random_params(rng: np.random.Generator, gamma: float = 0.0) -> EffectiveParams:
    return EffectiveParams(
        delta_at=float(rng.uniform(-1.0, 1.0)),
        delta_ph=float(rng.uniform(-1.0, 1.0)),
        lam=float(rng.uniform(-1.0, 1.0)),
        g_tilde=float(rng.uniform(0.5, 2.5)),
        kappa=float(rng.uniform(0.2, 1.0)),
        gamma=gamma,
        eta_r=float(rng.uniform(0.3, 1.5)),
        eta_i=float(rng.uniform(-0.5, 0.5)),
        n_spins=float(rng.choice([1.0, 2.0])),
    )
