"""Single paired insertion (SPI) moves between vehicles, with cached route evaluations."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .kernels import make_kernel
from .model import Instance, Solution
from .schedule import TOL, EvaluationLevel

UNIT_PENALTIES = (1.0, 1.0, 1.0, 1.0)


class InsertionMode(enum.Enum):
    ONE_STEP = 1
    TWO_STEP = 2


@dataclass(frozen=True)
class Move:
    request: int
    source: int
    target: int
    pickup_pos: int
    dropoff_pos: int
    objective: float = float("nan")
    feasible: bool = False


def penalized(parts: Sequence[float], penalties: Sequence[float]) -> float:
    c, q, d, w, t = parts
    a, b, g, u = penalties
    return c + a * q + b * d + g * w + u * t


def insert_pair(seq: Sequence[int], pickup: int, dropoff: int, a: int, b: int) -> List[int]:
    """Place ``pickup`` at index ``a`` and ``dropoff`` at index ``b`` of the result."""
    out = list(seq)
    out.insert(a, pickup)
    out.insert(b, dropoff)
    return out


def remove_pair(seq: Sequence[int], pickup: int, dropoff: int) -> List[int]:
    return [v for v in seq if v != pickup and v != dropoff]


class RouteCache:
    """Routes of one solution plus one cached evaluation per route.

    Evaluations are ``(cost, q, d, w, t)`` tuples and are refreshed only for
    routes a move touches.
    """

    def __init__(self, instance: Instance, solution: Solution, level=EvaluationLevel.LEVEL3,
                 ride_aware: bool = True, kernel=None):
        self.instance = instance
        self.n = instance.n_requests
        self.level = int(level)
        self.kernel = kernel if kernel is not None else make_kernel(instance, ride_aware)
        self.routes: List[List[int]] = [list(r.vertices) for r in solution.routes]
        self.vehicle_of = [-1] * (self.n + 1)
        for k, seq in enumerate(self.routes):
            for v in seq:
                if v <= self.n:
                    self.vehicle_of[v] = k
        self.parts: List[Tuple[float, ...]] = [self.kernel.evaluate(s, self.level) for s in self.routes]

    def copy(self) -> "RouteCache":
        new = object.__new__(RouteCache)
        new.instance, new.n, new.level, new.kernel = self.instance, self.n, self.level, self.kernel
        new.routes = [list(s) for s in self.routes]
        new.vehicle_of = list(self.vehicle_of)
        new.parts = list(self.parts)
        return new

    def totals(self) -> Tuple[float, float, float, float, float]:
        c = q = d = w = t = 0.0
        for pc, pq, pd, pw, pt in self.parts:
            c += pc
            q += pq
            d += pd
            w += pw
            t += pt
        return c, q, d, w, t

    def objective(self, penalties=UNIT_PENALTIES) -> float:
        return penalized(self.totals(), penalties)

    @property
    def feasible(self) -> bool:
        return all(x <= TOL for x in self.totals()[1:])

    def set_route(self, k: int, seq: List[int], parts=None) -> None:
        self.routes[k] = seq
        self.parts[k] = parts if parts is not None else self.kernel.evaluate(seq, self.level)
        for v in seq:
            if v <= self.n:
                self.vehicle_of[v] = k

    def solution(self) -> Solution:
        return Solution.from_sequences(self.instance, self.routes)

    def check_move(self, move: Move) -> None:
        if move.source == move.target:
            raise ValueError("SPI move needs distinct source and target vehicles")
        if self.vehicle_of[move.request] != move.source:
            raise ValueError(f"request {move.request} is not on vehicle {move.source}")
        r = len(self.routes[move.target])
        if not (0 <= move.pickup_pos < move.dropoff_pos <= r + 1):
            raise ValueError(
                f"positions ({move.pickup_pos}, {move.dropoff_pos}) invalid for route of length {r}"
            )

    def moved_routes(self, move: Move):
        i = move.request
        src = remove_pair(self.routes[move.source], i, i + self.n)
        dst = insert_pair(self.routes[move.target], i, i + self.n, move.pickup_pos, move.dropoff_pos)
        return src, dst

    def apply(self, move: Move, src_parts=None, dst_parts=None) -> None:
        self.check_move(move)
        src, dst = self.moved_routes(move)
        self.set_route(move.source, src, src_parts)
        self.set_route(move.target, dst, dst_parts)


def _cache_for(instance, solution, level, ride_aware=True) -> RouteCache:
    if isinstance(solution, RouteCache):
        return solution
    return RouteCache(instance, solution, level, ride_aware)


def enumerate_moves(
    instance: Instance,
    solution,
    mode: InsertionMode,
    level=EvaluationLevel.LEVEL3,
    penalties=UNIT_PENALTIES,
    ride_aware: bool = True,
) -> List[Move]:
    """All SPI moves, ordered by request then target vehicle.

    One-step insertion emits every (pickup, drop-off) position pair of every
    target route. Two-step insertion emits a single move per (request,
    target): the critical vertex goes to its best spot first and the other
    vertex is then placed on the allowed side of it.
    """
    cache = _cache_for(instance, solution, level, ride_aware)
    kernel, n = cache.kernel, cache.n
    lvl = cache.level
    base_parts = cache.totals()
    moves: List[Move] = []
    for i in range(1, n + 1):
        k = cache.vehicle_of[i]
        if k < 0:
            continue
        src = remove_pair(cache.routes[k], i, i + n)
        src_parts = kernel.evaluate(src, lvl)
        for k2 in range(len(cache.routes)):
            if k2 == k:
                continue
            dst = cache.routes[k2]
            rest = [base_parts[j] - cache.parts[k][j] - cache.parts[k2][j] + src_parts[j] for j in range(5)]
            if mode is InsertionMode.ONE_STEP:
                r = len(dst)
                for a in range(r + 1):
                    for b in range(a + 1, r + 2):
                        parts = kernel.evaluate(insert_pair(dst, i, i + n, a, b), lvl)
                        tot = [rest[j] + parts[j] for j in range(5)]
                        moves.append(Move(i, k, k2, a, b, penalized(tot, penalties),
                                          all(x <= TOL for x in tot[1:])))
            else:
                res = kernel.best_insertion(dst, i, True, lvl, *penalties)
                tot = [rest[j] + res[3 + j] for j in range(5)]
                moves.append(Move(i, k, k2, res[1], res[2], penalized(tot, penalties),
                                  all(x <= TOL for x in tot[1:])))
    return moves


def score_move(
    instance: Instance,
    solution,
    move: Move,
    level=EvaluationLevel.LEVEL3,
    penalties=UNIT_PENALTIES,
    ride_aware: bool = True,
) -> float:
    """Objective of the whole solution after ``move``; only the two touched routes are re-evaluated."""
    cache = _cache_for(instance, solution, level, ride_aware)
    cache.check_move(move)
    src, dst = cache.moved_routes(move)
    ps = cache.kernel.evaluate(src, cache.level)
    pd = cache.kernel.evaluate(dst, cache.level)
    tot = list(cache.totals())
    for j in range(5):
        tot[j] += ps[j] + pd[j] - cache.parts[move.source][j] - cache.parts[move.target][j]
    return penalized(tot, penalties)


def insertion_evaluations(instance: Instance, seq: Sequence[int], request: int,
                          mode: InsertionMode, level=EvaluationLevel.LEVEL3,
                          kernel: Optional[object] = None) -> int:
    """Number of route evaluations the best-insertion scan spends on one (request, route) pair."""
    kernel = kernel if kernel is not None else make_kernel(instance)
    res = kernel.best_insertion(list(seq), request, mode is InsertionMode.TWO_STEP, int(level),
                                *UNIT_PENALTIES)
    return int(res[-1])
