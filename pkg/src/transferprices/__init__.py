"""Coordinate the divisions of a firm through iteratively updated transfer prices.

The firm consists of sales divisions (concave revenue) and production
divisions (convex cost) trading bundles of commodities internally. A central
coordinator never sees the divisions' objectives; it quotes a price vector,
observes the aggregate excess supply that the divisions' best responses
produce, and updates the price. This package provides the division models,
the firm-level aggregation, the price-update algorithms (gradient descent,
an accelerated variant, and a parameter-free adaptive rule), reference
solvers for the coordination optimum, random instance generators, and a
harness that runs experiments, checks guarantees, and persists traces.
"""
from __future__ import annotations

from .coordinators import (
    ALGOS,
    GDConfig,
    NesterovState,
    RunResult,
    SoloState,
    gd_step,
    nesterov_init,
    nesterov_step,
    run_static,
    solo_init,
    solo_step,
)
from .divisions import (
    ConvergenceError,
    DivisionModel,
    Family,
    PowerProductionParams,
    PowerSalesParams,
    QuadProductionParams,
    QuadSalesParams,
    RegularityConstants,
    Role,
    best_response_production,
    best_response_sales,
    box_qp_maximize,
    evaluate,
    lipschitz_bound,
    regularity_constants,
    strong_modulus,
)
from .firm import (
    FirmInstance,
    Plan,
    PricePoint,
    dual_value,
    evaluate_price,
    excess_supply,
    lagrangian,
    max_sales_lipschitz,
    primal_value,
    stimulated_plan,
)
from .harness import (
    BoundCheck,
    ExperimentConfig,
    ExperimentOutput,
    SummaryReport,
    rate_fit,
    read_trace,
    run_experiment,
    sampler_spec_for,
    summarize,
    write_summary,
    write_trace,
)
from .oracle import (
    OracleSolution,
    dual_bisection_1d,
    dual_descent_nd,
    expected_dual_saa,
    grid_bruteforce_primal,
    solo_regret_rhs,
    theorem2_bound,
    theorem3_bounds,
)
from .scenario import SamplerSpec, ScenarioStream, run_dynamic, sample_instance
from .trace import Trace, TraceRecord

__version__ = "0.1.0"

__all__ = [
    "ALGOS",
    "BoundCheck",
    "ConvergenceError",
    "DivisionModel",
    "ExperimentConfig",
    "ExperimentOutput",
    "Family",
    "FirmInstance",
    "GDConfig",
    "NesterovState",
    "OracleSolution",
    "Plan",
    "PowerProductionParams",
    "PowerSalesParams",
    "PricePoint",
    "QuadProductionParams",
    "QuadSalesParams",
    "RegularityConstants",
    "Role",
    "RunResult",
    "SamplerSpec",
    "ScenarioStream",
    "SoloState",
    "SummaryReport",
    "Trace",
    "TraceRecord",
    "best_response_production",
    "best_response_sales",
    "box_qp_maximize",
    "dual_bisection_1d",
    "dual_descent_nd",
    "dual_value",
    "evaluate",
    "evaluate_price",
    "excess_supply",
    "expected_dual_saa",
    "gd_step",
    "grid_bruteforce_primal",
    "lagrangian",
    "lipschitz_bound",
    "max_sales_lipschitz",
    "nesterov_init",
    "nesterov_step",
    "primal_value",
    "rate_fit",
    "read_trace",
    "regularity_constants",
    "run_dynamic",
    "run_experiment",
    "run_static",
    "sample_instance",
    "sampler_spec_for",
    "solo_init",
    "solo_regret_rhs",
    "solo_step",
    "stimulated_plan",
    "strong_modulus",
    "summarize",
    "theorem2_bound",
    "theorem3_bounds",
    "write_summary",
    "write_trace",
    "__version__",
]
