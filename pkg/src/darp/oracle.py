"""Exhaustive ground truth for tiny instances and single-route schedules.

Nothing here reuses the staged scheduling procedure: ``brute_schedule`` and
``grid_schedule`` optimize the schedule directly from the constraint
definitions, so they can check it independently.
"""

from __future__ import annotations

import itertools
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .kernels import make_kernel
from .model import Instance, Solution
from .schedule import TOL, EvaluationLevel, check_route

MAX_EXACT_REQUESTS = 5
MAX_ROUTE_VERTICES = 8


class OracleRefused(ValueError):
    pass


# -- exact routing -----------------------------------------------------------


def _route_orders(instance: Instance, requests: Sequence[int], bound_cost):
    """Yield precedence-respecting orders of ``requests`` whose cost may beat ``bound_cost()``."""
    n, t = instance.n_requests, instance.travel
    cap = instance.vehicle_capacity
    loads = [v.load_change for v in instance.vertices]
    seq: List[int] = []

    def rec(pending, onboard, last, cost, load):
        if cost + t[last, 0] >= bound_cost():
            return
        if not pending and not onboard:
            yield list(seq)
            return
        for p in sorted(pending):
            if load + loads[p] > cap:
                continue
            seq.append(p)
            yield from rec(pending - {p}, onboard | {p}, p, cost + t[last, p], load + loads[p])
            seq.pop()
        for p in sorted(onboard):
            d = p + n
            seq.append(d)
            yield from rec(pending, onboard - {p}, d, cost + t[last, d], load + loads[d])
            seq.pop()

    yield from rec(frozenset(requests), frozenset(), 0, 0.0, 0)


def _best_route(instance: Instance, kernel, requests: Sequence[int], exact_schedules: bool):
    best = [math.inf, None]
    for order in _route_orders(instance, requests, lambda: best[0]):
        cost, q, d, w, t = kernel.evaluate(order, int(EvaluationLevel.LEVEL3))
        if q > TOL or cost >= best[0]:
            continue
        ok = d <= TOL and w <= TOL and t <= TOL
        if not ok and exact_schedules:
            ok = brute_schedule(instance, order) <= TOL
        if ok:
            best[:] = [cost, order]
    return best[0], best[1]


def exact_solve(instance: Instance, exact_schedules: bool = False) -> Optional[Tuple[float, Solution]]:
    """Minimum-cost fully feasible solution by enumeration, or ``None`` if none exists.

    A route counts as feasible when the level-3 schedule evaluation finds no
    violation. With ``exact_schedules`` a rejected route is re-checked with the
    exact schedule optimizer before it is discarded (slow; a cross-check on the
    staged procedure rather than a different answer in practice).
    """
    n, m = instance.n_requests, instance.n_vehicles
    if n > MAX_EXACT_REQUESTS:
        raise OracleRefused(f"exact_solve handles at most {MAX_EXACT_REQUESTS} requests, got {n}")
    kernel = make_kernel(instance)
    full = (1 << n) - 1
    route_cost = [math.inf] * (full + 1)
    route_seq: List[Optional[List[int]]] = [None] * (full + 1)
    route_cost[0], route_seq[0] = 0.0, []
    for mask in range(1, full + 1):
        reqs = [i + 1 for i in range(n) if mask >> i & 1]
        route_cost[mask], route_seq[mask] = _best_route(instance, kernel, reqs, exact_schedules)

    # cheapest split of the request set over at most m identical vehicles
    best = {0: (0.0, [])}
    layer = dict(best)
    for _ in range(m):
        nxt = {}
        for used, (cost, parts) in layer.items():
            rest = full & ~used
            sub = rest
            while True:
                c = cost + route_cost[sub]
                key = used | sub
                if c < math.inf and (key not in nxt or c < nxt[key][0] - 1e-12):
                    nxt[key] = (c, parts + [sub])
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        layer = nxt
    if full not in layer:
        return None
    cost, parts = layer[full]
    seqs = [route_seq[s] for s in parts if s]
    seqs += [[] for _ in range(m - len(seqs))]
    return cost, Solution.from_sequences(instance, seqs)


# -- schedule oracles ------------------------------------------------------


def _route_data(instance: Instance, route):
    seq = list(getattr(route, "vertices", route))
    check_route(instance, seq)
    if len(seq) > MAX_ROUTE_VERTICES:
        raise OracleRefused(f"schedule oracle handles at most {MAX_ROUTE_VERTICES} vertices")
    return seq


def brute_schedule(instance: Instance, route, weights=(1.0, 1.0, 1.0)) -> float:
    """Minimum of ``beta*duration_excess + gamma*lateness + tau*ride_excess`` over all schedules.

    Solved exactly as a linear program over the service start times (depot
    departure included); waiting is allowed anywhere. ``weights`` is
    ``(beta, gamma, tau)``.
    """
    seq = _route_data(instance, route)
    beta, gamma, tau = weights
    if not seq:
        return 0.0
    n, t = instance.n_requests, instance.travel
    verts = instance.vertices
    r = len(seq)
    stops = [0] + seq + [0]
    # variables: x[0..r+1] service starts (x0 = depot departure), then slack vars
    n_start = r + 2
    late_idx = {k: n_start + i for i, k in enumerate(range(1, r + 1))}
    pos = {v: k for k, v in enumerate(stops) if k and k <= r}
    drops = [k for k in range(1, r + 1) if stops[k] > n]
    ride_idx = {k: n_start + r + i for i, k in enumerate(drops)}
    dur_idx = n_start + r + len(drops)
    nvar = dur_idx + 1

    c = np.zeros(nvar)
    for k in late_idx.values():
        c[k] = gamma
    for k in ride_idx.values():
        c[k] = tau
    c[dur_idx] = beta

    rows, rhs = [], []

    def le(coeffs, bound):
        row = np.zeros(nvar)
        for j, a in coeffs:
            row[j] += a
        rows.append(row)
        rhs.append(bound)

    for k in range(1, r + 2):
        # x[k-1] + s + t <= x[k]
        prev = stops[k - 1]
        gap = (verts[prev].service_duration if k > 1 else 0.0) + t[prev, stops[k]]
        le([(k - 1, 1.0), (k, -1.0)], -gap)
    for k in range(1, r + 1):
        le([(k, 1.0), (late_idx[k], -1.0)], verts[stops[k]].window_latest)
    L = instance.max_ride_time
    for k in drops:
        pk = pos[stops[k] - n]
        le([(k, 1.0), (pk, -1.0), (ride_idx[k], -1.0)], verts[stops[pk]].service_duration + L)
    le([(r + 1, 1.0), (0, -1.0), (dur_idx, -1.0)], instance.max_route_duration)

    bounds = [(verts[0].window_earliest, None)]
    bounds += [(verts[v].window_earliest, None) for v in seq]
    bounds += [(verts[0].window_earliest, None)]
    bounds += [(0.0, None)] * (nvar - n_start)
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"schedule LP failed: {res.message}")
    return max(float(res.fun), 0.0)


def grid_schedule(
    instance: Instance,
    route,
    weights=(1.0, 1.0, 1.0),
    step: float = 1.0,
    reach: Optional[float] = None,
    max_points: int = 2_000_000,
) -> float:
    """Grid search over the depot departure and extra waits at pickups.

    Each decision ranges over ``0, step, ..., reach`` minutes on top of the
    earliest feasible time (``reach`` defaults to the horizon). Waiting
    anywhere else never helps, so this grid covers all schedules up to
    discretization. Meant for routes with very few pickups.
    """
    seq = _route_data(instance, route)
    beta, gamma, tau = weights
    if not seq:
        return 0.0
    n, t = instance.n_requests, instance.travel
    verts = instance.vertices
    reach = instance.horizon if reach is None else reach
    steps = np.arange(0.0, reach + 0.5 * step, step)
    pickups = [k for k, v in enumerate(seq) if v <= n]
    dims = 1 + len(pickups)
    if steps.size ** dims > max_points:
        raise OracleRefused(f"grid of {steps.size}^{dims} points exceeds {max_points}")
    grids = np.meshgrid(*([steps] * dims), indexing="ij")
    extra = [g.ravel() for g in grids]
    depart0 = verts[0].window_earliest + extra[0]

    L, Tk = instance.max_ride_time, instance.max_route_duration
    lateness = np.zeros_like(depart0)
    ride = np.zeros_like(depart0)
    start = {}
    leave = depart0
    prev = 0
    pick_extra = dict(zip(pickups, extra[1:]))
    for k, v in enumerate(seq):
        arrive = leave + t[prev, v]
        b = np.maximum(arrive, verts[v].window_earliest)
        if k in pick_extra:
            b = b + pick_extra[k]
        start[v] = b
        lateness += np.maximum(b - verts[v].window_latest, 0.0)
        if v > n:
            p = v - n
            ride += np.maximum(b - (start[p] + verts[p].service_duration) - L, 0.0)
        leave = b + verts[v].service_duration
        prev = v
    end = leave + t[prev, 0]
    duration = np.maximum(end - depart0 - Tk, 0.0)
    total = beta * duration + gamma * lateness + tau * ride
    return float(total.min())


def enumerate_routes(requests: Sequence[int], n: int):
    """All precedence-respecting orderings of the given requests (small sets only)."""
    verts = list(requests) + [r + n for r in requests]
    for perm in itertools.permutations(verts):
        seen = set()
        ok = True
        for v in perm:
            if v > n and v - n not in seen:
                ok = False
                break
            seen.add(v)
        if ok:
            yield list(perm)
