"""Facility-selection solvers over shipment/box cost matrices."""
from boxsuite.pmedian.grasp import GraspParams, greedy_construct, path_relink, solve_grasp
from boxsuite.pmedian.instance import (
    PMedianInstance,
    SolveResult,
    Suite,
    check_feasible,
    extract_assignment,
    save_result_json,
    solve_exact,
    suite_cost,
)
from boxsuite.pmedian.interchange import closest_two, local_search_interchange
from boxsuite.pmedian.kernels import BACKENDS, active_backend
from boxsuite.pmedian.lagrangian import LagrangianParams, dual_value, solve_lagrangian

__all__ = [
    "BACKENDS",
    "GraspParams",
    "LagrangianParams",
    "PMedianInstance",
    "SolveResult",
    "Suite",
    "active_backend",
    "check_feasible",
    "closest_two",
    "dual_value",
    "extract_assignment",
    "greedy_construct",
    "local_search_interchange",
    "path_relink",
    "save_result_json",
    "solve_exact",
    "solve_grasp",
    "suite_cost",
]
