"""Half-eigenvalues, nodal branches, and bifurcation intervals for
one-dimensional p-Laplacian Dirichlet problems, computed by shooting.

The equation solved on (0, L), with u(0) = u(L) = 0:

    (phi_p(u'))' + lam * a(x) * phi_p(u)
                 + alpha(x) * phi_p(u+) + beta(x) * phi_p(u-) = 0

where phi_p(s) = |s|^(p-2) s, u+ = max(u, 0), u- = -min(u, 0). When a
nonlinearity f with homogeneous limits is present the spectral term
becomes lam * r * a(x) * f(u); a bounded oscillatory f or a higher-order
perturbation g instead adds to the plain term.
"""

from .errors import (
    ContinuationStalledError,
    DegenerateZeroError,
    HalfeigError,
    HypothesisError,
    InputError,
    NoBracketError,
    NoCrossingError,
    NoRootError,
    NumericalError,
    StepFailureError,
    VanishingDenominatorError,
    WindowError,
    WrongNodalCountError,
)
from .scalars import ArchEquation, Exponent, conjugate, fucik_arch_oracle, \
    phi_p, phi_p_inv, pi_p
from .problems import CoefficientFn, NonlinearitySpec, ProblemSpec, \
    constant_problem, load_problem, parse_problem
from .shooting import Trajectory, integrate, integrate_raw, warmup
from .spectrum import HalfEigenvalue, SimplicityReport, closed_form_lambda, \
    eigenvalue, half_eigenvalue, half_spectrum, nodal_root, shoot_miss, \
    simplicity_check, spectrum_csv
from .comparison import NonexistenceReport, SturmVerdict, nonexistence_scan, \
    picone_young_gap, sturm_verdict, zero_divergence_probe
from .branches import Branch, BranchPoint, BifurcationEstimate, \
    NodalSolution, OverlapReport, bifurcation_csv, bifurcation_interval, \
    branch_csv, estimate_bifurcation_set, intervals_overlap_check, \
    nodal_csv, nodal_solutions_at_unity, oscillatory_family_problem, \
    oscillatory_family_residual, solve_at_amplitude, trace_branch
from .verify import SUITES, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "ArchEquation", "BifurcationEstimate", "Branch", "BranchPoint",
    "CoefficientFn", "ContinuationStalledError", "DegenerateZeroError",
    "Exponent", "HalfEigenvalue", "HalfeigError", "HypothesisError",
    "InputError", "NoBracketError", "NoCrossingError", "NoRootError",
    "NodalSolution", "NonexistenceReport", "NonlinearitySpec",
    "NumericalError", "OverlapReport", "ProblemSpec", "SUITES",
    "SimplicityReport", "StepFailureError", "SturmVerdict", "SuiteReport",
    "Trajectory", "VanishingDenominatorError", "WindowError",
    "WrongNodalCountError", "bifurcation_csv", "bifurcation_interval",
    "branch_csv", "closed_form_lambda", "conjugate", "constant_problem",
    "eigenvalue", "estimate_bifurcation_set", "fucik_arch_oracle",
    "half_eigenvalue", "half_spectrum", "integrate", "integrate_raw",
    "intervals_overlap_check", "load_problem", "nodal_csv", "nodal_root",
    "nodal_solutions_at_unity", "nonexistence_scan",
    "oscillatory_family_problem", "oscillatory_family_residual",
    "parse_problem", "phi_p", "phi_p_inv", "pi_p", "picone_young_gap",
    "run_suite", "shoot_miss", "simplicity_check", "solve_at_amplitude",
    "spectrum_csv", "sturm_verdict", "trace_branch", "warmup",
    "zero_divergence_probe",
]
