"""Seeded corpus generators for the acceptance suite.

Every generator is a pure function of its seed so that failures reproduce
exactly; acceptance tests freeze the seeds they use.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from boxsuite.fitting import FitProblem
from boxsuite.model import BoxSet, CandidateBox, Carton, Dims3, Shipment


def fit_instances(count: int = 1000, seed: int = 20260819) -> list[FitProblem]:
    """Random fitting problems: n in 2..5, carton dims 1..6, box dims 1..10.

    Roughly a quarter of the instances carry height-oriented flags and
    roughly 15 percent carry bottom-resting flags (at least one carton each
    when the instance is chosen).
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 6))
        ho_instance = rng.random() < 0.25
        br_instance = rng.random() < 0.15
        cartons = []
        for k in range(n):
            dims = Dims3(*(int(x) for x in rng.integers(1, 7, size=3)))
            ho = ho_instance and (k == 0 or rng.random() < 0.5)
            br = br_instance and (k == 0 or rng.random() < 0.5)
            cartons.append(Carton(dims, height_oriented=ho, bottom_resting=br))
        box = Dims3(*(int(x) for x in rng.integers(1, 11, size=3)))
        out.append(FitProblem(cartons=tuple(cartons), box=box))
    return out


def single_carton_instances(count: int = 200, seed: int = 515) -> list[FitProblem]:
    """One-carton problems mixing clear fits, clear misses, and flag cases."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        dims = Dims3(*(int(x) for x in rng.integers(1, 9, size=3)))
        carton = Carton(dims, height_oriented=bool(rng.random() < 0.3),
                        bottom_resting=bool(rng.random() < 0.2))
        box = Dims3(*(int(x) for x in rng.integers(1, 11, size=3)))
        out.append(FitProblem(cartons=(carton,), box=box))
    return out


DUPLICATE_CORPUS = Path(__file__).parent / "data" / "duplicate_corpus.json"


def duplicate_fit_instances() -> list[FitProblem]:
    """100 frozen duplicate-carton instances that actually reach branching.

    Regenerated by :func:`select_duplicate_corpus`; kept as data so the
    acceptance run does not pay the selection cost and the node-count
    comparison stays anchored to one fixed corpus.
    """
    with DUPLICATE_CORPUS.open() as fh:
        rows = json.load(fh)
    return [FitProblem(cartons=tuple(Carton(Dims3(*c)) for c in row["cartons"]),
                       box=Dims3(*row["box"])) for row in rows]


def select_duplicate_corpus(path=DUPLICATE_CORPUS, count: int = 100,
                            seed: int = 20260821) -> None:
    """Rebuild the frozen duplicate-carton corpus.

    Candidates stack 3+ copies of one carton (plus fillers) into two
    side-by-side piles and snug the box around them, shrinking one axis by
    0-2. Trivially decided candidates say nothing about symmetry breaking,
    so candidates are kept only when the default solver needs >= 50 nodes
    and every on/off combination of the two constraint families finishes
    well inside the 10 s limit (<= 120k nodes).
    """
    from boxsuite.fitting import SolverConfig, solve_fit

    rng = np.random.default_rng(seed)
    kept = []
    while len(kept) < count:
        n = int(rng.integers(4, 7))
        base = Carton(Dims3(*(int(x) for x in rng.integers(2, 7, size=3))))
        copies = int(rng.integers(3, n + 1))
        cartons = [base] * copies
        for _ in range(n - copies):
            cartons.append(Carton(Dims3(*(int(x) for x in rng.integers(1, 7, size=3)))))
        split = int(rng.integers(1, n))
        piles = [cartons[:split], cartons[split:]]
        dims = []
        for pile in piles:
            w = max(c.dims.as_tuple()[0] for c in pile)
            dpt = max(c.dims.as_tuple()[1] for c in pile)
            h = sum(c.dims.as_tuple()[2] for c in pile)
            dims.append((w, dpt, h))
        b = [dims[0][0] + dims[1][0], max(dims[0][1], dims[1][1]),
             max(dims[0][2], dims[1][2])]
        axis = int(rng.integers(0, 3))
        b[axis] = max(1, b[axis] + int(rng.choice((-2, -1, 0))))
        prob = FitProblem(cartons=tuple(cartons), box=Dims3(*b))
        nodes = {}
        ok = True
        for ident in (True, False):
            for orth in (True, False):
                v = solve_fit(prob, SolverConfig(time_limit=10.0,
                                                 use_identical_symmetry=ident,
                                                 use_orthant_symmetry=orth))
                if v.timed_out or v.nodes > 120_000:
                    ok = False
                    break
                nodes[(ident, orth)] = v.nodes
            if not ok:
                break
        if ok and nodes[(True, True)] >= 50:
            kept.append(prob)
    rows = [{"cartons": [list(map(int, c.dims.as_tuple())) for c in p.cartons],
             "box": list(map(int, p.box.as_tuple()))} for p in kept]
    with Path(path).open("w") as fh:
        json.dump(rows, fh)


def has_duplicate_cartons(problem: FitProblem) -> bool:
    sigs = [(c.dims.as_tuple(), c.height_oriented, c.bottom_resting)
            for c in problem.cartons]
    return len(sigs) != len(set(sigs))


def pmedian_instances(count: int = 50, seed: int = 4242):
    """(d, p) pairs with n=60 customers, m=15 facilities, costs U[1,100]."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        d = rng.uniform(1.0, 100.0, size=(60, 15))
        out.append((d, (2, 3, 4)[k % 3]))
    return out


def small_pipeline_cases(count: int = 100, seed: int = 31337):
    """Small recommendation problems with random locks (k < p)."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        n_boxes = int(rng.integers(4, 13))
        boxes = []
        seen = set()
        bid = 1
        while len(boxes) < n_boxes:
            dims = tuple(sorted((int(x) for x in rng.integers(2, 9, size=3)),
                                reverse=True))
            if dims in seen:
                continue
            seen.add(dims)
            boxes.append(CandidateBox(id=bid, inner=Dims3(*dims)))
            bid += 1
        box_set = BoxSet(boxes)
        n_ship = int(rng.integers(3, 21))
        shipments = []
        for s in range(n_ship):
            n = int(rng.integers(1, 4))
            cartons = tuple(
                Carton(Dims3(*(int(x) for x in rng.integers(1, 7, size=3))),
                       height_oriented=bool(rng.random() < 0.2),
                       bottom_resting=bool(rng.random() < 0.1))
                for _ in range(n))
            shipments.append(Shipment(id=s + 1, cartons=cartons))
        p = int(rng.integers(2, min(5, n_boxes)))
        k = int(rng.integers(0, p))
        locked = tuple(int(boxes[j].id) for j in
                       rng.choice(n_boxes, size=k, replace=False)) if k else ()
        cases.append((shipments, box_set, p, locked))
    return cases


# Carton-count distribution matching a retail order mix: ~79% of shipments
# have 1-3 cartons (decided by the exact small solvers), the rest 4-8.
_CARTON_COUNT_WEIGHTS = (0.35, 0.25, 0.19, 0.10, 0.05, 0.03, 0.02, 0.01)


def desk_dataset(seed: int = 90210, n_shipments: int = 300,
                 n_items: int = 150):
    """Shipments of 1-8 cartons drawn from an integral item pool.

    Item dims are integral and sorted nonincreasing, small relative to the
    step-2 candidate grid (largest box (39,20,15)) so nearly every shipment
    is packable. Each shipment draws its carton count from the retail-like
    mix above, then fills it with 1-3 distinct items and quantities.
    """
    rng = np.random.default_rng(seed)
    items = []
    for _ in range(n_items):
        a = int(rng.integers(2, 15))
        b = int(rng.integers(1, 10))
        c = int(rng.integers(1, 7))
        items.append(tuple(sorted((a, b, c), reverse=True)))
    counts = rng.choice(np.arange(1, 9), size=n_shipments,
                        p=_CARTON_COUNT_WEIGHTS)
    shipments = []
    for s in range(n_shipments):
        total = int(counts[s])
        n_unique = int(rng.integers(1, min(3, total) + 1))
        picks = rng.choice(n_items, size=n_unique, replace=False)
        # Split the carton count across the chosen items, each at least once.
        quantities = [1] * n_unique
        for _ in range(total - n_unique):
            quantities[int(rng.integers(0, n_unique))] += 1
        cartons = []
        for idx, qty in zip(picks, quantities):
            cartons.extend(Carton(Dims3(*items[idx])) for _ in range(qty))
        shipments.append(Shipment(id=s + 1, cartons=tuple(cartons)))
    return shipments
