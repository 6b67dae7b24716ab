"""Numerical experiments on sharp Moser-Trudinger inequalities for fractional operators."""

from .bessel import bessel_potential, bessel_potential_mass
from .constants import (ExponentPair, OperatorSpec, alpha_classical, alpha_np, constants_table, gamma_n,
                        kappa_np, log_kernel_constant, poincare_lower_bound, pv_normalizer,
                        riesz_ft_constant, taylor_coeffs, taylor_remainder)
from .errors import (ContractError, DivergenceError, DomainError, FracMoserError, QuadratureError,
                     SaturationError, SolverError)
from .fraclap import (bessel_minus_riesz_radial, bessel_norm_p, bessel_pointwise, frac_lap,
                      frac_lap_pointwise, seminorm, seminorm_p)
from .moser import MoserParams, decompose, log_part, plateau_value, u_eps, v_eps
from .mt_functionals import (SweepRow, WeightFn, bessel_sharpness_sweep, exp_functional,
                             is_condition_search, phi_truncated, sharpness_row, sharpness_sweep)
from .nehari import (DiscreteSpace, NehariResult, ProblemParams, assemble_space, lambda1,
                     minimize_on_S, nehari_project, weak_residual)
from .profiles import RadialProfile, Region, Tail, lp_norm, lp_norm_p
from .specfun import ball_volume, gamma_fn, sphere_measure

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
