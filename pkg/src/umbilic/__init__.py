"""Nonlinear feedback laws built from structurally stable polynomial folds.

The package evaluates a small catalog of structurally stable polynomial
forms, wires them as feedback around six linear plant families, locates and
classifies the resulting equilibria, audits tabulated stability inequalities
against the eigenvalue oracle, and runs the built-in parameter-sweep
scenarios to CSV/JSON/SVG artifacts.
"""

from .artifacts import (
    ArtifactWriter,
    emit_report_artifacts,
    emit_sweep_artifacts,
    parse_run_csv,
    resolve_output_dir,
)
from .catalog import (
    BUTTERFLY,
    CUSP,
    ELLIPTIC_UMBILIC,
    FOLD,
    HYPERBOLIC_UMBILIC,
    KINDS,
    PARABOLIC_UMBILIC,
    SWALLOWTAIL,
    ControllerSpec,
    axis_quadratic,
    coefficient_count,
    elliptic_feedback,
    germ_gradient,
    germ_value,
    polynomial_gradient,
    polynomial_value,
    unfolding_gradient,
    unfolding_value,
    variable_count,
)
from .conditions import (
    AuditReport,
    ConditionReport,
    audit_conditions,
    builtin_audit_grid,
    condition_labels,
    evaluate_conditions,
)
from .equilibria import (
    EPS_HYPERBOLIC,
    NONHYPERBOLIC,
    STABLE,
    UNSTABLE,
    ClosedFormUnavailable,
    Equilibrium,
    classify,
    classify_equilibrium,
    closed_form_equilibria,
    closed_form_points,
    find_equilibria_numeric,
    is_hyperbolic,
    matrix_eigenvalues,
)
from .plants import (
    AIRCRAFT,
    CCF,
    EPIDEMIC,
    FAMILIES,
    INTEGRATORS,
    JORDAN,
    NOMINAL_AIRCRAFT,
    NOMINAL_SUBMARINE,
    SUBMARINE,
    AircraftParams,
    CcfParams,
    ClosedLoopSystem,
    EpidemicParams,
    IntegratorsParams,
    JordanParams,
    SubmarineParams,
    build_system,
    compiled_rhs,
    make_params,
    param_names,
    standard_coefficients,
    standard_feedback,
)
from .scenarios import (
    GAIN_LATTICE,
    SUBMARINE_GAINS,
    builtin_scenarios,
    get_scenario,
    recommended_horizon,
    scenario_names,
    select_submarine_gains,
)
from .simulate import (
    CONVERGED,
    DIVERGED,
    RK4_FIXED,
    RK45_ADAPTIVE,
    UNDECIDED,
    SolverConfig,
    Trajectory,
    Verdict,
    detect_convergence,
    integrate,
)
from .sweeps import (
    PRODUCT,
    ZIP,
    RunRecord,
    SweepResult,
    SweepSpec,
    VaryAxis,
    run_sweep,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "AIRCRAFT",
    "AircraftParams",
    "ArtifactWriter",
    "AuditReport",
    "BUTTERFLY",
    "CCF",
    "CONVERGED",
    "CUSP",
    "CcfParams",
    "ClosedFormUnavailable",
    "ClosedLoopSystem",
    "ConditionReport",
    "ControllerSpec",
    "DIVERGED",
    "ELLIPTIC_UMBILIC",
    "EPIDEMIC",
    "EPS_HYPERBOLIC",
    "EpidemicParams",
    "Equilibrium",
    "FAMILIES",
    "FOLD",
    "GAIN_LATTICE",
    "HYPERBOLIC_UMBILIC",
    "INTEGRATORS",
    "IntegratorsParams",
    "JORDAN",
    "JordanParams",
    "KINDS",
    "NONHYPERBOLIC",
    "NOMINAL_AIRCRAFT",
    "NOMINAL_SUBMARINE",
    "PARABOLIC_UMBILIC",
    "PRODUCT",
    "RK45_ADAPTIVE",
    "RK4_FIXED",
    "RunRecord",
    "STABLE",
    "SUBMARINE",
    "SUBMARINE_GAINS",
    "SWALLOWTAIL",
    "SolverConfig",
    "SubmarineParams",
    "SweepResult",
    "SweepSpec",
    "Trajectory",
    "UNDECIDED",
    "UNSTABLE",
    "VaryAxis",
    "Verdict",
    "ZIP",
    "audit_conditions",
    "axis_quadratic",
    "build_system",
    "builtin_audit_grid",
    "builtin_scenarios",
    "classify",
    "classify_equilibrium",
    "closed_form_equilibria",
    "closed_form_points",
    "coefficient_count",
    "compiled_rhs",
    "condition_labels",
    "detect_convergence",
    "elliptic_feedback",
    "emit_report_artifacts",
    "emit_sweep_artifacts",
    "evaluate_conditions",
    "find_equilibria_numeric",
    "germ_gradient",
    "germ_value",
    "get_scenario",
    "integrate",
    "is_hyperbolic",
    "make_params",
    "matrix_eigenvalues",
    "param_names",
    "parse_run_csv",
    "polynomial_gradient",
    "polynomial_value",
    "recommended_horizon",
    "resolve_output_dir",
    "run_sweep",
    "scenario_names",
    "select_submarine_gains",
    "standard_coefficients",
    "standard_feedback",
    "summarize",
    "unfolding_gradient",
    "unfolding_value",
    "variable_count",
]
