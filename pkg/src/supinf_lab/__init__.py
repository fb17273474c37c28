"""Numerical checks of sup x inf inequalities for prescribed scalar curvature
equations with a subcritical perturbation, in the radial setting."""

from .blowup import (BlowupDiagnostics, blowup_report, concentration_function, rescale,
                     select_blowup_point)
from .bubble import BubbleParams, bubble_eval, bubble_family_eval, bubble_pde_residual, bubble_profile
from .core import (Exponents, RadialGrid, RegionSpec, SolutionProfile, annulus, ball, eval_profile,
                   extremum_on, geometric_grid, make_exponents, uniform_grid)
from .curvature import CurvatureProfile
from .emden_fowler import EFProfile, apply_L, ef_residual, from_ef, shift_profile, to_ef
from .errors import (ConfigError, DimensionError, DomainError, DomainTooLargeError, SearchError,
                     SolverError, SolverInstabilityError, SupInfLabError)
from .moving_plane import (MovingPlaneReport, compare, find_xi, hopf_conclusion_check, lemma2_check,
                           lemma_n4_check, reflect, z_decomposition)
from .radial_solver import ShootingConfig, holder_bound_check, pde_residual, solve_shoot
from .supinf import SweepConfig, SweepReport, run_sweep, theorem_hypothesis_audit

__version__ = "0.1.0"
