"""Initial solutions: greedy sequential insertion and the random baseline."""

from __future__ import annotations

import random

from .kernels import make_kernel
from .model import Instance, Solution
from .neighborhood import UNIT_PENALTIES, insert_pair, penalized
from .schedule import EvaluationLevel


def construct_greedy(instance: Instance, rng_seed: int, level=EvaluationLevel.LEVEL3,
                     ride_aware: bool = True, kernel=None) -> Solution:
    """Insert requests one by one, in a seeded random order, where the unit-penalty objective grows least.

    Every (vehicle, pickup position, drop-off position) triple is tried; ties
    go to the first one found scanning vehicles, then pickup positions, then
    drop-off positions in ascending order.
    """
    n, m = instance.n_requests, instance.n_vehicles
    kernel = kernel if kernel is not None else make_kernel(instance, ride_aware)
    lvl = int(level)
    order = list(range(1, n + 1))
    random.Random(rng_seed).shuffle(order)
    routes = [[] for _ in range(m)]
    current = [penalized(kernel.evaluate(r, lvl), UNIT_PENALTIES) for r in routes]
    for i in order:
        best = None
        for k in range(m):
            res = kernel.best_insertion(routes[k], i, False, lvl, *UNIT_PENALTIES)
            delta = res[0] - current[k]
            if best is None or delta < best[0]:
                best = (delta, k, res[1], res[2], res[0])
        _, k, a, b, f = best
        routes[k] = insert_pair(routes[k], i, i + n, a, b)
        current[k] = f
    return Solution.from_sequences(instance, routes)


def construct_random(instance: Instance, rng_seed: int) -> Solution:
    """Each request goes to a uniformly drawn vehicle, pickup then drop-off appended."""
    n, m = instance.n_requests, instance.n_vehicles
    rng = random.Random(rng_seed)
    routes = [[] for _ in range(m)]
    for i in range(1, n + 1):
        k = rng.randrange(m)
        routes[k] += [i, i + n]
    return Solution.from_sequences(instance, routes)
