"""Branch-and-bound feasibility solver for the n-carton fitting problem.

The underlying integer model has, per carton, orientation binaries (which dim
lies along which axis) and continuous lower-left-bottom coordinates, and per
carton pair a disjunction of six separation relations ("i left of k", ...).
This solver branches directly on those decisions and replaces LP relaxation
with interval propagation: each carton keeps a per-axis interval [lo, hi] of
feasible start coordinates, and every chosen relation "x_v >= x_u + w" tightens
the intervals via fixpoint relaxation. A full, consistent assignment yields a
packing witness at x = lo.

Two optional symmetry-breaking families prune mirrored/permuted duplicates
without affecting feasibility:
  - identical cartons (same dims multiset and same constraint flags) are
    grouped consecutively and forced into nondecreasing x order;
  - the anchor carton (smallest volume, first of its identical group) is
    confined to the lower-left-bottom half-intervals of the box. When
    bottom-resting enforcement is active the z half-interval restriction is
    dropped (floor constraints break the reflection argument).
"""
from __future__ import annotations

from time import perf_counter
from typing import Optional

from boxsuite.fitting.types import (
    FitProblem,
    FitVerdict,
    Outcome,
    Placement,
    SolverConfig,
    orientation_extents,
)

__all__ = ["solve_fit"]

_REL_CAP_SLACK = 1e-15


class _TimeUp(Exception):
    pass


def solve_fit(problem: FitProblem, cfg: Optional[SolverConfig] = None) -> FitVerdict:
    if cfg is None:
        cfg = SolverConfig()
    search = _Search(problem, cfg)
    return search.run()


class _Search:
    def __init__(self, problem: FitProblem, cfg: SolverConfig):
        self.problem = problem
        self.cfg = cfg
        self.box = problem.box.as_tuple()
        self.eps = problem.eps
        self.t0 = perf_counter()
        self.deadline = self.t0 + cfg.time_limit
        self.nodes = 0

    def _verdict(self, outcome: Outcome, witness=None) -> FitVerdict:
        return FitVerdict(outcome, witness=witness, nodes=self.nodes,
                          wall_time=perf_counter() - self.t0)

    # -- root construction ---------------------------------------------------

    def _identity_key(self, i: int):
        c = self.problem.cartons[i]
        p, q, r = c.dims.as_tuple()
        br = bool(self.problem.enforce_br and c.bottom_resting)
        if self.problem.enforce_ho and c.height_oriented:
            lw = (p, q) if p >= q else (q, p)
            return ("ho", lw, r, br)
        return ("free", tuple(sorted((p, q, r), reverse=True)), br)

    def run(self) -> FitVerdict:
        prob, box, eps = self.problem, self.box, self.eps
        n = prob.n

        # Group identical cartons consecutively (stable within each group).
        first_seen: dict = {}
        for i in range(n):
            first_seen.setdefault(self._identity_key(i), len(first_seen))
        self.work2orig = sorted(range(n), key=lambda i: (first_seen[self._identity_key(i)], i))
        cartons = [prob.cartons[i] for i in self.work2orig]
        keys = [self._identity_key(i) for i in self.work2orig]

        options = []
        for c in cartons:
            opts = [e for e in orientation_extents(c, prob.enforce_ho)
                    if all(e[a] <= box[a] + eps for a in range(3))]
            if not opts:
                return self._verdict(Outcome.NO_FIT)
            options.append(opts)
        self.options = options

        box_volume = box[0] * box[1] * box[2]
        if sum(c.dims.volume for c in cartons) > box_volume + eps:
            return self._verdict(Outcome.NO_FIT)

        # Orientation-pair compatibility: a pair with no separating axis under
        # any orientation combination cannot coexist in the box.
        self.pair_sep = {}
        for i in range(n):
            for k in range(i + 1, n):
                table = {}
                any_ok = False
                for oi, ei in enumerate(options[i]):
                    for ok_, ek in enumerate(options[k]):
                        sep = any(ei[a] + ek[a] <= box[a] + eps for a in range(3))
                        table[oi, ok_] = sep
                        any_ok = any_ok or sep
                if not any_ok:
                    return self._verdict(Outcome.NO_FIT)
                self.pair_sep[i, k] = table

        min_ext = [tuple(min(e[a] for e in opts) for a in range(3)) for opts in options]
        lo = [[0.0, 0.0, 0.0] for _ in range(n)]
        hi = [[box[a] - min_ext[i][a] for a in range(3)] for i in range(n)]

        for i, c in enumerate(cartons):
            if prob.enforce_br and c.bottom_resting:
                hi[i][2] = min(hi[i][2], 0.0)

        # Anchor: smallest volume, ties to the lowest index; groups are
        # consecutive so this is the first member of its identical group.
        if self.cfg.use_orthant_symmetry:
            beta = min(range(n), key=lambda i: (cartons[i].dims.volume, i))
            beta = next(w for w in range(n) if keys[w] == keys[beta])
            clamp_axes = (0, 1) if prob.enforce_br else (0, 1, 2)
            for a in clamp_axes:
                hi[beta][a] = min(hi[beta][a], box[a] / 2.0)

        # Persistent zero-weight edges x_m <= x_{m+1} between consecutive
        # identical cartons.
        self.edges = {0: [], 1: [], 2: []}  # axis -> list of (u, v, w)
        self.ident_pairs = set()
        if self.cfg.use_identical_symmetry:
            for i in range(n - 1):
                if keys[i] == keys[i + 1]:
                    self.edges[0].append((i, i + 1, 0.0))
                    self.ident_pairs.add((i, i + 1))

        self.n = n
        self.cartons = cartons
        self.ext: list[Optional[tuple]] = [None] * n
        self.oriented = [False] * n
        self.pairs = [(i, k) for i in range(n) for k in range(i + 1, n)]
        self.decided = {pair: False for pair in self.pairs}
        self.solution = None

        # Fix all single-option orientations up front.
        for i in range(n):
            if len(options[i]) == 1 and not self._apply_orientation(i, 0, lo, hi):
                return self._verdict(Outcome.NO_FIT)
        for a in range(3):
            if not self._propagate_axis(a, lo, hi):
                return self._verdict(Outcome.NO_FIT)

        try:
            found = self._dfs(lo, hi)
        except _TimeUp:
            return self._verdict(Outcome.TIMED_OUT)
        if not found:
            return self._verdict(Outcome.NO_FIT)
        flo, fext = self.solution
        witness = tuple(
            Placement(self.work2orig[w], fext[w], (flo[w][0], flo[w][1], flo[w][2]))
            for w in range(n)
        )
        witness = tuple(sorted(witness, key=lambda pl: pl.carton))
        return self._verdict(Outcome.FIT, witness=witness)

    # -- propagation ---------------------------------------------------------

    def _propagate_axis(self, axis: int, lo, hi) -> bool:
        """Relax all edges of one axis to fixpoint. False iff infeasible.

        Without positive cycles a fixpoint is reached within n full passes
        (longest paths visit each node once); still changing after that means
        a positive cycle, i.e. contradictory orderings.
        """
        edges = self.edges[axis]
        eps = self.eps
        for _ in range(self.n + 2):
            changed = False
            for u, v, w in edges:
                nl = lo[u][axis] + w
                if nl > lo[v][axis] + _REL_CAP_SLACK:
                    if nl > hi[v][axis] + eps:
                        return False
                    lo[v][axis] = nl
                    changed = True
                nh = hi[v][axis] - w
                if nh < hi[u][axis] - _REL_CAP_SLACK:
                    if nh < lo[u][axis] - eps:
                        return False
                    hi[u][axis] = nh
                    changed = True
            if not changed:
                return True
        return False

    def _apply_orientation(self, i: int, opt_idx: int, lo, hi) -> bool:
        e = self.options[i][opt_idx]
        self.ext[i] = e
        self.oriented[i] = True
        ok = True
        for a in range(3):
            bound = self.box[a] - e[a]
            if bound < hi[i][a]:
                hi[i][a] = bound
                if hi[i][a] < lo[i][a] - self.eps:
                    ok = False
        return ok

    def _relation_candidates(self, pair, lo, hi):
        """Feasible separation relations for an oriented pair, best slack first.

        Returns (candidates, entailed) where an entailed relation already holds
        for every coordinate choice in the current intervals (intervals only
        tighten, so it stays satisfied; no edge needed).
        """
        i, k = pair
        eps = self.eps
        out = []
        for axis in range(3):
            for u, v in ((i, k), (k, i)):
                if (u, v) == (k, i) and axis == 0 and pair in self.ident_pairs:
                    continue  # contradicts the identical-order constraint
                w = self.ext[u][axis]
                if hi[u][axis] + w <= lo[v][axis] + eps:
                    return None, (u, v, axis, w)
                slack = hi[v][axis] - (lo[u][axis] + w)
                if slack >= -eps:
                    out.append((-slack, len(out), (u, v, axis, w)))
        out.sort()
        return [c for _, _, c in out], None

    # -- search --------------------------------------------------------------

    def _dfs(self, lo, hi) -> bool:
        if perf_counter() > self.deadline:
            raise _TimeUp
        trail = []  # locally decided pairs (with or without an edge)

        def undo_trail():
            for pair, has_edge, axis in reversed(trail):
                self.decided[pair] = False
                if has_edge:
                    self.edges[axis].pop()

        # Forced moves: decide every pair that is entailed or has exactly one
        # feasible relation left, until stable.
        while True:
            forced = None
            branch_pair = None
            branch_cands = None
            for pair in self.pairs:
                if self.decided[pair]:
                    continue
                i, k = pair
                if not (self.oriented[i] and self.oriented[k]):
                    continue
                cands, entailed = self._relation_candidates(pair, lo, hi)
                if entailed is not None:
                    self.decided[pair] = True
                    trail.append((pair, False, 0))
                    self.nodes += 1
                    forced = "entailed"
                    break
                if not cands:
                    undo_trail()
                    return False
                if len(cands) == 1:
                    forced = ("edge", pair, cands[0])
                    break
                if branch_cands is None or len(cands) < len(branch_cands):
                    branch_pair, branch_cands = pair, cands
            if forced is None:
                break
            if forced == "entailed":
                continue
            _, pair, (u, v, axis, w) = forced
            self.decided[pair] = True
            self.edges[axis].append((u, v, w))
            trail.append((pair, True, axis))
            self.nodes += 1
            nl = lo[u][axis] + w
            if nl > lo[v][axis]:
                lo[v][axis] = nl
            if not self._propagate_axis(axis, lo, hi):
                undo_trail()
                return False

        undecided_orient = [i for i in range(self.n) if not self.oriented[i]]
        if branch_pair is None and not undecided_orient:
            self.solution = ([row[:] for row in lo], list(self.ext))
            return True

        # Branch on the smallest decision: an orientation choice or a pair
        # relation, whichever has fewer alternatives (pairs win ties).
        best_orient = None
        if undecided_orient:
            best_orient = min(undecided_orient, key=lambda i: (len(self.options[i]), i))
        if branch_pair is not None and (
            best_orient is None or len(branch_cands) <= len(self.options[best_orient])
        ):
            pair = branch_pair
            for u, v, axis, w in branch_cands:
                self.nodes += 1
                nlo = [row[:] for row in lo]
                nhi = [row[:] for row in hi]
                nl = nlo[u][axis] + w
                if nl > nlo[v][axis]:
                    nlo[v][axis] = nl
                self.decided[pair] = True
                self.edges[axis].append((u, v, w))
                if self._propagate_axis(axis, nlo, nhi) and self._dfs(nlo, nhi):
                    return True
                self.edges[axis].pop()
                self.decided[pair] = False
            undo_trail()
            return False

        i = best_orient
        for opt_idx in range(len(self.options[i])):
            e = self.options[i][opt_idx]
            compatible = True
            for k in range(self.n):
                if k == i or not self.oriented[k]:
                    continue
                pair = (i, k) if i < k else (k, i)
                table = self.pair_sep[pair]
                key = (opt_idx, self.options[k].index(self.ext[k]))
                if pair == (k, i):
                    key = (key[1], key[0])
                if not table[key]:
                    compatible = False
                    break
            if not compatible:
                continue
            self.nodes += 1
            nlo = [row[:] for row in lo]
            nhi = [row[:] for row in hi]
            if self._apply_orientation(i, opt_idx, nlo, nhi):
                if all(self._propagate_axis(a, nlo, nhi) for a in range(3)):
                    if self._dfs(nlo, nhi):
                        return True
            self.ext[i] = None
            self.oriented[i] = False
        undo_trail()
        return False
