"""Feasibility tests for packing cartons into a candidate box.

Layered from cheap to complete:

- :func:`fits_single` / :func:`necessary_condition` / :func:`fits_stacking`
  are closed-form screens (exact for one carton, one-sided otherwise);
- :func:`fits_exact_small` settles two or three cartons exactly;
- :func:`solve_fit` is the general branch-and-bound decision procedure;
- :func:`oracle_fit` is an independent exhaustive reference used for
  cross-checking (exponential, keep n small);
- :func:`check_witness` validates a claimed packing against the box and the
  orientation/floor constraints.
"""
from boxsuite.fitting.checks import (
    aggregate_sorted_dims,
    fits_single,
    fits_stacking,
    necessary_condition,
)
from boxsuite.fitting.oracle import oracle_fit
from boxsuite.fitting.small import fits_exact_small
from boxsuite.fitting.solver import solve_fit
from boxsuite.fitting.types import (
    FitProblem,
    FitVerdict,
    Outcome,
    Placement,
    SolverConfig,
    check_witness,
    effective_sorted_dims,
    orientation_extents,
)

__all__ = [
    "FitProblem",
    "FitVerdict",
    "Outcome",
    "Placement",
    "SolverConfig",
    "aggregate_sorted_dims",
    "check_witness",
    "effective_sorted_dims",
    "fits_exact_small",
    "fits_single",
    "fits_stacking",
    "necessary_condition",
    "orientation_extents",
    "oracle_fit",
    "solve_fit",
]
