"""Structural Poisson brackets and covariant Hamiltonian flows in the
complex phase-space chart z_j = q_j + i p_j."""

from .brackets import (StructuredSystem, geobracket, geometrio, gspb,
                       pb_complex, pb_real, structural_derivative)
from .bridge import CrossCheckReport, cross_check, gchs_real_rate, gspb_real
from .checks import InvariantResult, run_invariant_suite
from .dynamics import (CovariantRate, EquilibriumReport, beta,
                       covariant_acceleration, equilibrium_residual,
                       exponential_solution, gchs_rate, s_dynamics,
                       tghs_velocity, tghs_velocity_pair, thorough_rate)
from .errors import (BlowUpError, ConsistencyError, DomainError,
                     ExpressionError, GchsError, IntegrationError,
                     RealnessError, ScenarioError, StepUnderflowError)
from .fields import (ScalarField, SecondDerivatives, WirtingerGradient,
                     evaluate, gradient, parse_field, second_derivatives)
from .integrate import (MonitorReport, StepperConfig, Trajectory,
                        integrate_equilibrium, integrate_perturbed,
                        integrate_tghs, monitor_report)
from .phasespace import (ComplexCoords, PhasePoint, from_complex,
                         real_from_wirtinger, to_complex, wirtinger_from_real)
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ComplexCoords", "ConsistencyError", "CovariantRate",
    "CrossCheckReport", "DomainError", "EquilibriumReport", "ExpressionError",
    "GchsError", "IntegrationError", "InvariantResult", "MonitorReport",
    "PhasePoint", "RealnessError", "ScalarField", "Scenario", "ScenarioError",
    "SecondDerivatives", "StepUnderflowError", "StepperConfig",
    "StructuredSystem", "Trajectory", "WirtingerGradient", "beta",
    "covariant_acceleration", "cross_check", "equilibrium_residual",
    "evaluate", "exponential_solution", "from_complex", "gchs_rate",
    "gchs_real_rate", "geobracket", "geometrio", "gradient", "gspb",
    "gspb_real", "integrate_equilibrium", "integrate_perturbed",
    "integrate_tghs", "load_scenario", "monitor_report", "parse_field",
    "pb_complex", "pb_real", "real_from_wirtinger", "run_invariant_suite",
    "s_dynamics", "second_derivatives", "structural_derivative",
    "tghs_velocity", "tghs_velocity_pair", "thorough_rate", "to_complex",
    "wirtinger_from_real",
]
