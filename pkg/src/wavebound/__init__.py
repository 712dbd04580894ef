"""1D wave-equation solver with certified error accounting.

Solves the three-point explicit scheme in binary64 exactly as the naive C
loop would, re-executes it in exact rational (or 256-bit) arithmetic as an
oracle, checks CFL/energy/convergence properties against the d'Alembert
solution, measures and reconstructs the floating-point round-off error
through the scheme's impulse-response kernel, and evaluates an explicit
total-error bound.
"""

from ._exact import (
    HP_EQUAL_TOL,
    HP_PRECISION_BITS,
    hp_context,
    hp_to_rational,
    rational,
)
from .analytic import (
    AnalyticCase,
    Regularity,
    antisym_extend,
    bump_case,
    chi_bump,
    dalembert_eval,
    sample_exact,
    sample_inputs,
    sample_row,
)
from .bounds import (
    EFFECTIVE_CHECKPOINTS,
    FIGURE_POINTS,
    FIGURE_RANGE,
    FIGURE_T_MAX,
    FIGURE_XI,
    SLOPE_WINDOW,
    BoundConstants,
    CflLineMinimum,
    LinePoint,
    OptimumGap,
    SurfacePoint,
    bound_constants,
    bound_surface,
    bound_validity,
    cfl_line_minimum,
    checkpoint_steps,
    effective_error_at,
    line_slopes,
    log_spaced,
    optimum_gap,
    right_panel,
    spatial_roundoff_norm_bound,
    step_count_inequality,
    total_error_bound,
)
from .energy import (
    EnergyReport,
    EnergySeries,
    discrete_energy,
    discrete_energy_exact,
    energy_bounds_check,
    energy_series,
)
from .errors import ErrorReport, convergence_error, order_fit, truncation_error
from .grid import (
    GridSpec,
    PhysicsParams,
    cfl_check,
    cfl_dt,
    dot_dx,
    dot_dx_exact,
    floor_ratio,
    grid_for_steps,
    make_grid,
    norm_dx,
    norm_sq_dx_exact,
    step_of_t,
)
from .roundoff import (
    A_GAP_BOUND,
    DELTA_BOUND,
    RECONSTRUCT_MAX_NODES,
    KernelReport,
    KernelTable,
    RoundoffStudy,
    attach_global,
    lambda_checks,
    lambda_table,
    local_deltas,
    reconstruct_global_roundoff,
    roundoff_bound,
)
from .scheme import (
    COMPILED_ENGINE_AVAILABLE,
    MIN_COURANT,
    MIN_DT,
    ORACLE_RATIONAL_MAX_NODES,
    Field2D,
    SchemeInputs,
    apply_stiffness,
    exact_a,
    linearity_probe,
    listing_a,
    solve_checkpoint_rows,
    solve_final_row,
    solve_scheme,
)

__version__ = "0.1.0"

__all__ = [
    "A_GAP_BOUND",
    "AnalyticCase",
    "BoundConstants",
    "CflLineMinimum",
    "COMPILED_ENGINE_AVAILABLE",
    "DELTA_BOUND",
    "EFFECTIVE_CHECKPOINTS",
    "EnergyReport",
    "EnergySeries",
    "ErrorReport",
    "FIGURE_POINTS",
    "FIGURE_RANGE",
    "FIGURE_T_MAX",
    "FIGURE_XI",
    "Field2D",
    "GridSpec",
    "HP_EQUAL_TOL",
    "HP_PRECISION_BITS",
    "KernelReport",
    "KernelTable",
    "LinePoint",
    "MIN_COURANT",
    "MIN_DT",
    "ORACLE_RATIONAL_MAX_NODES",
    "OptimumGap",
    "PhysicsParams",
    "RECONSTRUCT_MAX_NODES",
    "Regularity",
    "RoundoffStudy",
    "SLOPE_WINDOW",
    "SchemeInputs",
    "SurfacePoint",
    "antisym_extend",
    "attach_global",
    "apply_stiffness",
    "bound_constants",
    "bound_surface",
    "bound_validity",
    "bump_case",
    "cfl_check",
    "cfl_dt",
    "cfl_line_minimum",
    "checkpoint_steps",
    "chi_bump",
    "convergence_error",
    "dalembert_eval",
    "discrete_energy",
    "discrete_energy_exact",
    "dot_dx",
    "dot_dx_exact",
    "effective_error_at",
    "energy_bounds_check",
    "energy_series",
    "exact_a",
    "floor_ratio",
    "grid_for_steps",
    "hp_context",
    "hp_to_rational",
    "lambda_checks",
    "lambda_table",
    "line_slopes",
    "linearity_probe",
    "listing_a",
    "local_deltas",
    "log_spaced",
    "make_grid",
    "norm_dx",
    "norm_sq_dx_exact",
    "optimum_gap",
    "order_fit",
    "rational",
    "reconstruct_global_roundoff",
    "right_panel",
    "roundoff_bound",
    "sample_exact",
    "sample_inputs",
    "sample_row",
    "solve_checkpoint_rows",
    "solve_final_row",
    "solve_scheme",
    "spatial_roundoff_norm_bound",
    "step_count_inequality",
    "step_of_t",
    "total_error_bound",
    "truncation_error",
]
