"""Exact fit deciders for 2- and 3-carton problems.

n=2: two axis-aligned cuboids are disjoint iff separated along some axis, so
feasibility reduces to finding an orientation pair and an axis whose summed
extents fit, with each remaining extent contained. n=3 falls back to the
canonical-position enumeration, restricted to three cartons.
"""
from __future__ import annotations

from time import perf_counter

from boxsuite.model import DataError

from boxsuite.fitting.oracle import canonical_search
from boxsuite.fitting.types import FitProblem, FitVerdict, Outcome, Placement, orientation_extents

__all__ = ["fits_exact_small"]


def fits_exact_small(problem: FitProblem) -> FitVerdict:
    if problem.n == 2:
        return _fits_two(problem)
    if problem.n == 3:
        return canonical_search(problem)
    raise DataError(f"fits_exact_small handles 2 or 3 cartons, got {problem.n}")


def _fits_two(problem: FitProblem) -> FitVerdict:
    t0 = perf_counter()
    eps = problem.eps
    box = problem.box.as_tuple()
    c0, c1 = problem.cartons
    br0 = problem.enforce_br and c0.bottom_resting
    br1 = problem.enforce_br and c1.bottom_resting
    nodes = 0
    for e0 in orientation_extents(c0, problem.enforce_ho):
        if not all(e0[a] <= box[a] + eps for a in range(3)):
            continue
        for e1 in orientation_extents(c1, problem.enforce_ho):
            if not all(e1[a] <= box[a] + eps for a in range(3)):
                continue
            for axis in range(3):
                nodes += 1
                if e0[axis] + e1[axis] > box[axis] + eps:
                    continue
                if axis == 2:
                    if br0 and br1:
                        continue  # someone would leave the floor
                    bottom, top = (1, 0) if br1 else (0, 1)
                else:
                    bottom, top = 0, 1
                ext = {0: e0, 1: e1}
                origins = {bottom: (0.0, 0.0, 0.0)}
                off = [0.0, 0.0, 0.0]
                off[axis] = ext[bottom][axis]
                origins[top] = tuple(off)
                witness = (
                    Placement(0, e0, origins[0]),
                    Placement(1, e1, origins[1]),
                )
                return FitVerdict(Outcome.FIT, witness=witness, nodes=nodes,
                                  wall_time=perf_counter() - t0)
    return FitVerdict(Outcome.NO_FIT, nodes=nodes, wall_time=perf_counter() - t0)
