"""Services package."""

from rts_lab.services.bccks import BccksError, bccks_bounds, plan_segments, simulate_rts_evolution
from rts_lab.services.mixing_core import MixingError, modified_coefficients, verify_mixing_lemma
from rts_lab.services.ode import OdeError, build_encoding, verify_mixed_solution
from rts_lab.services.optimizer import (
    InfeasibleBudgetError,
    OptimizerError,
    UnreachableTargetError,
    min_cost_for_error,
    min_error_for_budget,
)
from rts_lab.services.qsp import QspError, qsp_hs_bounds, usa_bounds
from rts_lab.services.series_kernel import SeriesDomainError, taylor_tail

__all__ = [
    "BccksError",
    "InfeasibleBudgetError",
    "MixingError",
    "OdeError",
    "OptimizerError",
    "QspError",
    "SeriesDomainError",
    "UnreachableTargetError",
    "bccks_bounds",
    "build_encoding",
    "min_cost_for_error",
    "min_error_for_budget",
    "modified_coefficients",
    "plan_segments",
    "qsp_hs_bounds",
    "simulate_rts_evolution",
    "taylor_tail",
    "usa_bounds",
    "verify_mixed_solution",
    "verify_mixing_lemma",
]
