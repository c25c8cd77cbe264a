"""Core p-median types, exact enumeration, assignment extraction."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from boxsuite.model import DataError

__all__ = [
    "PMedianInstance",
    "Suite",
    "SolveResult",
    "suite_cost",
    "extract_assignment",
    "check_feasible",
    "solve_exact",
    "save_result_json",
]


@dataclass(frozen=True)
class Suite:
    """A set of exactly p open facilities, stored sorted for determinism."""

    members: tuple[int, ...]

    def __init__(self, members):
        object.__setattr__(self, "members", tuple(sorted(members)))
        if len(set(self.members)) != len(self.members):
            raise DataError("suite members must be distinct")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, j: int) -> bool:
        return j in set(self.members)

    def __iter__(self):
        return iter(self.members)


class PMedianInstance:
    """n customers, m facilities, open p, nonnegative cost matrix d."""

    def __init__(self, d: np.ndarray, p: int):
        d = np.ascontiguousarray(np.asarray(d, dtype=np.float64))
        if d.ndim != 2 or d.size == 0:
            raise DataError("cost matrix must be 2-D and nonempty")
        if not np.isfinite(d).all() or (d < 0).any():
            raise DataError("costs must be finite and nonnegative")
        self.d = d
        self.n, self.m = d.shape
        if not 1 <= p <= self.m:
            raise DataError(f"p must be in 1..{self.m}, got {p}")
        self.p = int(p)

    def suite(self, members) -> Suite:
        s = Suite(members)
        if len(s) != self.p:
            raise DataError(f"suite must have exactly {self.p} members")
        if s.members and (s.members[0] < 0 or s.members[-1] >= self.m):
            raise DataError("suite member out of range")
        return s


@dataclass(frozen=True)
class SolveResult:
    suite: Suite
    cost: float
    lower_bound: Optional[float] = None
    gap: Optional[float] = None
    bound_trace: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.lower_bound is not None and self.gap is not None:
            if self.gap < 0:
                raise DataError("gap must be nonnegative")


def suite_cost(inst: PMedianInstance, suite: Suite) -> float:
    return float(inst.d[:, suite.members].min(axis=1).sum())


def extract_assignment(inst: PMedianInstance, suite: Suite) -> np.ndarray:
    """Per-customer chosen facility, ties to the lowest facility index."""
    sub = inst.d[:, suite.members]
    pos = sub.argmin(axis=1)  # first occurrence = lowest index (members sorted)
    return np.asarray(suite.members, dtype=np.int64)[pos]


def check_feasible(result: SolveResult, gamma: float) -> Optional[Suite]:
    """The suite, or None when the objective proves a coverage/lock failure.

    Any suite that covers every real row below the penalty and contains all
    locked boxes costs at most the sum of row maxima, which is gamma - 1; a
    single penalty assignment already costs gamma. Splitting at gamma - 0.5
    therefore separates the two cases with a full unit of slack.
    """
    if result.cost > gamma - 0.5:
        return None
    return result.suite


def solve_exact(inst: PMedianInstance, max_subsets: int = 200_000,
                max_m: int = 25) -> SolveResult:
    """Globally optimal suite by subset enumeration; first optimum in
    lexicographic order wins ties."""
    n_subsets = math.comb(inst.m, inst.p)
    if inst.m > max_m or n_subsets > max_subsets:
        raise DataError(
            f"exact enumeration over {n_subsets} subsets (m={inst.m}) exceeds the "
            f"budget; use the interchange, GRASP, or Lagrangian solvers instead")
    d = inst.d
    best_cost = math.inf
    best: Optional[tuple[int, ...]] = None
    for S in itertools.combinations(range(inst.m), inst.p):
        total = float(d[:, S].min(axis=1).sum())
        if total < best_cost - 1e-12:
            best_cost, best = total, S
    assert best is not None
    return SolveResult(suite=Suite(best), cost=best_cost,
                       lower_bound=best_cost, gap=0.0)


def save_result_json(result: SolveResult, path: str | Path,
                     facility_ids: Optional[Sequence[int]] = None,
                     wall_time: Optional[float] = None) -> None:
    members = list(result.suite.members)
    payload = {
        "suite": members if facility_ids is None
                 else [int(facility_ids[j]) for j in members],
        "cost": result.cost,
        "lower_bound": result.lower_bound,
        "gap": result.gap,
        "wall_time": wall_time,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
