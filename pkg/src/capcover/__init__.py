"""Capacitated covering with balls: exact LP relaxation, bicriteria rounding, oracles and verifiers."""

from .assignment import feasible_with, integral_assignment, integralize, max_flow
from .errors import (
    BudgetExceeded,
    CapcoverError,
    InfeasibleError,
    InstanceError,
    InvariantViolation,
    UnboundedError,
)
from .field import GOLDEN, SQRT5, TWO_PLUS_SQRT5, QSqrt5
from .instance import (
    Ball,
    Instance,
    MetricSpace,
    Variant,
    format_instance,
    from_set_cover,
    generate_random,
    make_instance,
    parse_instance,
    read_instance,
    validate_instance,
    validate_metric,
    write_instance,
)
from .lp import (
    dump_lp,
    FractionalSolution,
    LPModel,
    build_aux1_lp,
    build_aux2_lp,
    build_mmcc_lp,
    check_lp_feasibility,
    solve_lp,
)
from .oracle import OracleResult, greedy_cover, lp_vertex_optimum, min_set_cover, optimal_cover
from .rounding import PipelineConfig, PipelineResult, run_pipeline
from .solution import RoundedSolution, format_solution, parse_solution
from .verify import VerificationReport, check_solution, check_trace

__all__ = [name for name in dir() if not name.startswith("_")]
