"""Problem/verdict types shared by all fitting deciders, plus the witness checker."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

from boxsuite.model import Carton, DataError, Dims3, tolerance_for

__all__ = [
    "FitProblem",
    "FitVerdict",
    "Outcome",
    "Placement",
    "SolverConfig",
    "orientation_extents",
    "effective_sorted_dims",
    "check_witness",
]


class Outcome(enum.Enum):
    FIT = "fit"
    NO_FIT = "no_fit"
    TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class FitProblem:
    """Can these cartons be packed into this box?

    ``box`` dims are taken as given (unsorted); the third component is the
    vertical axis, which matters when height-oriented or bottom-resting
    constraints are enforced.
    """

    cartons: tuple[Carton, ...]
    box: Dims3
    enforce_ho: bool = True
    enforce_br: bool = True

    def __post_init__(self) -> None:
        if len(self.cartons) < 1:
            raise DataError("fit problem needs at least one carton")

    @property
    def n(self) -> int:
        return len(self.cartons)

    @property
    def eps(self) -> float:
        return tolerance_for(self.box)

    def has_ho(self) -> bool:
        return self.enforce_ho and any(c.height_oriented for c in self.cartons)

    def has_br(self) -> bool:
        return self.enforce_br and any(c.bottom_resting for c in self.cartons)


@dataclass(frozen=True)
class Placement:
    """One carton's placement: chosen axis extents and lower-left-bottom corner."""

    carton: int
    extents: tuple[float, float, float]
    origin: tuple[float, float, float]

    def to_json_dict(self) -> dict:
        return {"carton": self.carton, "extents": list(self.extents), "origin": list(self.origin)}


@dataclass(frozen=True)
class FitVerdict:
    outcome: Outcome
    witness: Optional[tuple[Placement, ...]] = None
    nodes: int = 0
    wall_time: float = 0.0

    @property
    def is_fit(self) -> bool:
        return self.outcome is Outcome.FIT

    @property
    def timed_out(self) -> bool:
        return self.outcome is Outcome.TIMED_OUT


@dataclass(frozen=True)
class SolverConfig:
    """Branch-and-bound controls.

    Both symmetry-breaking families only prune symmetric duplicates; toggling
    them never changes the verdict. The anchor rule picks the carton whose
    position gets the first-orthant restriction.
    """

    time_limit: float = 5.0
    use_identical_symmetry: bool = True
    use_orthant_symmetry: bool = True
    anchor_rule: str = "smallest-volume"

    def __post_init__(self) -> None:
        if not self.time_limit > 0:
            raise DataError("time_limit must be positive")
        if self.anchor_rule != "smallest-volume":
            raise DataError(f"unknown anchor rule {self.anchor_rule!r}")


def orientation_extents(carton: Carton, enforce_ho: bool = True) -> tuple[tuple[float, float, float], ...]:
    """Allowed axis-extent triples for a carton (deduplicated, deterministic order).

    A free carton may use all 6 axis permutations; a height-oriented carton only
    the 2 that keep its height component vertical.
    """
    p, q, r = carton.dims.as_tuple()
    if enforce_ho and carton.height_oriented:
        opts = {(p, q, r), (q, p, r)}
    else:
        opts = set(permutations((p, q, r)))
    return tuple(sorted(opts))


def effective_sorted_dims(carton: Carton, enforce_ho: bool = True) -> tuple[float, float, float]:
    """Per-carton sorted dims for the scan heuristics.

    Free cartons sort all three components nonincreasing; height-oriented
    cartons sort only length/width and keep the height in place.
    """
    p, q, r = carton.dims.as_tuple()
    if enforce_ho and carton.height_oriented:
        lw = (p, q) if p >= q else (q, p)
        return (lw[0], lw[1], r)
    a, b, c = sorted((p, q, r), reverse=True)
    return (a, b, c)


def check_witness(problem: FitProblem, witness: Sequence[Placement], eps: Optional[float] = None) -> bool:
    """Independent re-check of a claimed packing against every active constraint."""
    if eps is None:
        eps = problem.eps
    if len(witness) != problem.n:
        return False
    if sorted(pl.carton for pl in witness) != list(range(problem.n)):
        return False
    box = problem.box.as_tuple()
    for pl in witness:
        carton = problem.cartons[pl.carton]
        if pl.extents not in orientation_extents(carton, problem.enforce_ho):
            return False
        if problem.enforce_br and carton.bottom_resting and abs(pl.origin[2]) > eps:
            return False
        for axis in range(3):
            if pl.origin[axis] < -eps:
                return False
            if pl.origin[axis] + pl.extents[axis] > box[axis] + eps:
                return False
    for i in range(len(witness)):
        for k in range(i + 1, len(witness)):
            if not _disjoint(witness[i], witness[k], eps):
                return False
    return True


def _disjoint(a: Placement, b: Placement, eps: float) -> bool:
    for axis in range(3):
        if a.origin[axis] + a.extents[axis] <= b.origin[axis] + eps:
            return True
        if b.origin[axis] + b.extents[axis] <= a.origin[axis] + eps:
            return True
    return False
