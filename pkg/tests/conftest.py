import random

from boxsuite.fitting import FitProblem
from boxsuite.model import Carton, Dims3


def random_fit_problem(rng: random.Random, n_range=(1, 4), dim_max=5, box_max=8,
                       ho_prob=0.25, br_prob=0.15, dup_prob=0.0) -> FitProblem:
    """Seeded random instance in the shape the fitting corpus uses."""
    n = rng.randint(*n_range)
    cartons = []
    for _ in range(n):
        dims = Dims3(*(rng.randint(1, dim_max) for _ in range(3)))
        cartons.append(Carton(dims,
                              height_oriented=rng.random() < ho_prob,
                              bottom_resting=rng.random() < br_prob))
    if n >= 2 and rng.random() < dup_prob:
        cartons[1] = cartons[0]
    box = Dims3(*(rng.randint(2, box_max) for _ in range(3)))
    return FitProblem(tuple(cartons), box)


def sorted_lw(box: Dims3) -> Dims3:
    """Box with footprint dims nonincreasing, height kept third."""
    a, b = (box.a, box.b) if box.a >= box.b else (box.b, box.a)
    return Dims3(a, b, box.c)
