"""Mean-field simulator and bifurcation analyzer for a pumped, lossy
cavity array of three-level atoms reduced to a nonlinear Jaynes-Cummings
model."""

from .array2d import (ClusterFixedPoint, ClusterResult, Homogeneous2DResult,
                      cluster_2d, homogeneous_2d, homogeneous_g1_star)
from .asymptotics import alpha2_asymptotic, fit_critical_exponent, g1_star, sx0, w0
from .dynamics import (IntegrationError, MFState, State2D, Trajectory, Trajectory2D,
                       global_spin_norm_2d, integrate, integrate_2d,
                       local_spin_norms_2d, rhs_1d, rhs_1d_jacobian, rhs_2d, spin_norm)
from .params import (ConfigError, EffectiveParams, Params2D, PhysicalParams,
                     derive_effective_params, effective_params_from_config,
                     params_2d_from_config, parse_config, read_config)
from .stability import (HopfPoint, LimitCycle, Spectrum, classify, classify_branches,
                        find_limit_cycle, hopf_scan, jacobian, spectrum)
from .steady import (NewtonError, SteadyBranch, SweepResult, TransitionPoints,
                     continuation_sweep, lambda_poly_branch, newton_refine,
                     quartic_w_branch, solve_branches, theta_branch,
                     transition_points, trivial_branch)

__version__ = "0.1.0"
