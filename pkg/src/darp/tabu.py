"""Tabu search over SPI moves with adaptive penalties.

The variant grid crosses three schedule-evaluation levels with one- or
two-step insertion (TS_11 .. TS_32). ITS is TS_32 started from the greedy
construction on an instance with tightened time windows.
"""

from __future__ import annotations

import math
import random
import re
import time
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Tuple

from .construction import construct_greedy, construct_random
from .kernels import make_kernel
from .model import Instance, Solution
from .neighborhood import InsertionMode, Move, RouteCache, penalized, remove_pair, insert_pair
from .schedule import TOL, EvaluationLevel
from .timewindow import adjust_windows

PENALTY_FLOOR = 1e-3
PENALTY_CAP = 1e6


# -- penalties -------------------------------------------------------------


@dataclass(frozen=True)
class PenaltyState:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    tau: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.tau)


def update_penalties(state: PenaltyState, violations) -> PenaltyState:
    """Grow each coefficient by ``1 + delta`` while its constraint is violated, shrink it otherwise."""
    factor = 1.0 + state.delta
    new = []
    for coef, viol in zip(state.coefficients, violations):
        coef = coef * factor if viol > TOL else coef / factor
        new.append(min(max(coef, PENALTY_FLOOR), PENALTY_CAP))
    return replace(state, alpha=new[0], beta=new[1], gamma=new[2], tau=new[3])


# -- tabu memory -----------------------------------------------------------


class TabuList:
    """Forbids putting a request back on a vehicle it recently left.

    An attribute made tabu at iteration ``t`` with tenure ``theta`` blocks
    iterations ``t+1 .. t+theta``.
    """

    def __init__(self):
        self._until = {}
        self._since = {}

    def add(self, request: int, vehicle: int, iteration: int, tenure: int) -> None:
        self._until[(request, vehicle)] = iteration + tenure
        self._since[(request, vehicle)] = iteration

    def is_tabu(self, request: int, vehicle: int, iteration: int) -> bool:
        until = self._until.get((request, vehicle))
        return until is not None and self._since[(request, vehicle)] < iteration <= until

    def expire_oldest(self, iteration: int) -> bool:
        live = [(self._since[key], key) for key, until in self._until.items() if until >= iteration]
        if not live:
            return False
        _, key = min(live)
        del self._until[key]
        del self._since[key]
        return True

    def __len__(self):
        return len(self._until)


def is_aspirated(move: Move, move_cost: float, best_cost: Optional[float],
                 best_objective: float = math.inf) -> bool:
    """A tabu move is allowed when it beats the best feasible cost strictly.

    Before any feasible solution exists, beating the best objective seen is enough.
    """
    if best_cost is None:
        return move.objective < best_objective
    return move.feasible and move_cost < best_cost


# -- configuration ---------------------------------------------------------

VARIANTS = {
    "ts11": (EvaluationLevel.LEVEL1, InsertionMode.ONE_STEP),
    "ts12": (EvaluationLevel.LEVEL1, InsertionMode.TWO_STEP),
    "ts21": (EvaluationLevel.LEVEL2, InsertionMode.ONE_STEP),
    "ts22": (EvaluationLevel.LEVEL2, InsertionMode.TWO_STEP),
    "ts31": (EvaluationLevel.LEVEL3, InsertionMode.ONE_STEP),
    "ts32": (EvaluationLevel.LEVEL3, InsertionMode.TWO_STEP),
    "its": (EvaluationLevel.LEVEL3, InsertionMode.TWO_STEP),
}


def normalize_variant(label: str) -> str:
    key = re.sub(r"[\s_\-]", "", label).lower()
    if key not in VARIANTS:
        raise ValueError(f"unknown variant {label!r}; choose from {', '.join(VARIANTS)}")
    return key


def variant_label(key: str) -> str:
    key = normalize_variant(key)
    return "ITS" if key == "its" else f"TS_{key[2:]}"


def default_tenure(n_requests: int) -> int:
    return max(1, int(round(7.5 * math.log10(max(n_requests, 1)))))


@dataclass(frozen=True)
class SearchConfig:
    level: EvaluationLevel = EvaluationLevel.LEVEL3
    mode: InsertionMode = InsertionMode.TWO_STEP
    use_construction_heuristic: bool = False
    use_time_window_adjustment: bool = False
    tenure: Optional[int] = None  # None: 7.5 * log10(n)
    delta: float = 0.5
    intensification_period: int = 10
    diversification_weight: float = 0.015
    time_limit: float = 10.0  # seconds, on the selected clock
    seed: int = 0
    ride_aware_slack: bool = True
    max_iterations: Optional[int] = None
    clock: str = "wall"  # "wall", or "work": kernel vertex steps, deterministic
    work_per_ms: float = 80_000.0
    backend: Optional[str] = None

    def __post_init__(self):
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.intensification_period < 1:
            raise ValueError("intensification_period must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.clock not in ("wall", "work"):
            raise ValueError("clock must be 'wall' or 'work'")
        if self.work_per_ms <= 0:
            raise ValueError("work_per_ms must be positive")

    @classmethod
    def for_variant(cls, label: str, ch: bool = False, tw: bool = False, **kwargs) -> "SearchConfig":
        key = normalize_variant(label)
        level, mode = VARIANTS[key]
        if key == "its":
            ch = tw = True
        return cls(level=level, mode=mode, use_construction_heuristic=ch,
                   use_time_window_adjustment=tw, **kwargs)

    @property
    def label(self) -> str:
        base = f"TS_{int(self.level)}{self.mode.value}"
        if base == "TS_32" and self.use_construction_heuristic and self.use_time_window_adjustment:
            return "ITS"
        extras = [s for s, on in (("CH", self.use_construction_heuristic),
                                  ("TW", self.use_time_window_adjustment)) if on]
        return base + (f"({'+'.join(extras)})" if extras else "")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["level"] = int(self.level)
        out["mode"] = self.mode.name.lower()
        return out


# -- trace -----------------------------------------------------------------


@dataclass(frozen=True)
class TraceEvent:
    elapsed_ms: float
    best_cost: Optional[float]
    objective: float
    feasible: bool


@dataclass
class ConvergenceTrace:
    events: List[TraceEvent] = field(default_factory=list)
    first_feasible: Optional[Tuple[float, float]] = None  # (cost, elapsed_ms)

    def record(self, elapsed_ms, best_cost, objective, feasible) -> None:
        self.events.append(TraceEvent(elapsed_ms, best_cost, objective, feasible))

    def best_at(self, elapsed_ms: float) -> Optional[float]:
        """Best feasible cost known at or before ``elapsed_ms``."""
        best = None
        for ev in self.events:
            if ev.elapsed_ms > elapsed_ms:
                break
            if ev.best_cost is not None:
                best = ev.best_cost
        return best

    @property
    def final_best(self) -> Optional[float]:
        for ev in reversed(self.events):
            if ev.best_cost is not None:
                return ev.best_cost
        return None


@dataclass
class SearchResult:
    best: Optional[Solution]
    best_cost: Optional[float]
    trace: ConvergenceTrace
    iterations: int
    evaluations: int
    instance: Instance  # the instance actually searched (after window tightening)

    def __iter__(self):
        return iter((self.best, self.trace))


# -- intensification -------------------------------------------------------


def _improve_route(cache: RouteCache, k: int, penalties) -> bool:
    """Reinsert each request of route ``k`` at its best intra-route position; True if anything improved."""
    n, kernel, lvl = cache.n, cache.kernel, cache.level
    improved = False
    again = True
    while again:
        again = False
        for i in sorted(v for v in cache.routes[k] if v <= n):
            cur = penalized(cache.parts[k], penalties)
            rest = remove_pair(cache.routes[k], i, i + n)
            res = kernel.best_insertion(rest, i, False, lvl, *penalties)
            if res[0] < cur - 1e-9:
                cache.set_route(k, insert_pair(rest, i, i + n, res[1], res[2]), tuple(res[3:8]))
                improved = again = True
    return improved


def intensify(instance: Instance, solution: Solution, level=EvaluationLevel.LEVEL3,
              penalties=(1.0, 1.0, 1.0, 1.0), routes=None, ride_aware: bool = True) -> Solution:
    """Best intra-route reinsertion of every request, repeated until no move lowers the objective."""
    cache = RouteCache(instance, solution, level, ride_aware)
    for k in (range(len(cache.routes)) if routes is None else routes):
        _improve_route(cache, k, penalties)
    return cache.solution()


# -- main loop -------------------------------------------------------------


class _Clock:
    def __init__(self, config: SearchConfig):
        self.config = config
        self.start = time.perf_counter()
        self.kernel = None

    def ms(self) -> float:
        if self.config.clock == "work":
            return self.kernel.work / self.config.work_per_ms if self.kernel else 0.0
        return (time.perf_counter() - self.start) * 1000.0


def search(instance: Instance, config: SearchConfig) -> SearchResult:
    """Run tabu search until the time limit (or ``max_iterations``)."""
    clock = _Clock(config)
    limit_ms = config.time_limit * 1000.0
    if config.use_time_window_adjustment:
        instance = adjust_windows(instance)
    n, m = instance.n_requests, instance.n_vehicles
    kernel = make_kernel(instance, config.ride_aware_slack, config.backend)
    clock.kernel = kernel
    lvl = int(config.level)
    two_step = config.mode is InsertionMode.TWO_STEP

    if config.use_construction_heuristic:
        start = construct_greedy(instance, config.seed, config.level, config.ride_aware_slack, kernel)
    else:
        start = construct_random(instance, config.seed)
    cache = RouteCache(instance, start, config.level, kernel=kernel)

    tenure = config.tenure if config.tenure is not None else default_tenure(n)
    penalties = PenaltyState(delta=config.delta)
    tabu = TabuList()
    freq = [[0] * m for _ in range(n + 1)]
    for i in range(1, n + 1):
        freq[i][cache.vehicle_of[i]] += 1
    div_scale = config.diversification_weight * math.sqrt(n * m)

    trace = ConvergenceTrace()
    best_cost: Optional[float] = None
    best_routes = None
    best_objective = math.inf

    def note(now_ms):
        nonlocal best_cost, best_routes, best_objective
        tot = cache.totals()
        f = penalized(tot, penalties.coefficients)
        best_objective = min(best_objective, f)
        feasible = all(x <= TOL for x in tot[1:])
        if feasible and (best_cost is None or tot[0] < best_cost - 1e-9):
            best_cost = tot[0]
            best_routes = [list(s) for s in cache.routes]
            if trace.first_feasible is None:
                trace.first_feasible = (best_cost, now_ms)
            trace.record(now_ms, best_cost, f, True)
            return True
        return False

    if not note(clock.ms()):
        tot = cache.totals()
        trace.record(clock.ms(), None, penalized(tot, penalties.coefficients), False)

    iteration = 0
    touched = set()
    has_moves = m > 1 and n > 0
    while has_moves:
        if clock.ms() >= limit_ms:
            break
        if config.max_iterations is not None and iteration >= config.max_iterations:
            break
        iteration += 1
        coefs = penalties.coefficients
        tot = cache.totals()
        f_cur = penalized(tot, coefs)

        # score every (request, target vehicle) pair
        candidates = []
        for i in range(1, n + 1):
            k = cache.vehicle_of[i]
            src = remove_pair(cache.routes[k], i, i + n)
            src_parts = kernel.evaluate(src, lvl)
            for k2 in range(m):
                if k2 == k:
                    continue
                res = kernel.best_insertion(cache.routes[k2], i, two_step, lvl, *coefs)
                new = [tot[j] - cache.parts[k][j] - cache.parts[k2][j] + src_parts[j] + res[3 + j]
                       for j in range(5)]
                f_new = penalized(new, coefs)
                feasible = all(x <= TOL for x in new[1:])
                score = f_new
                if f_new >= f_cur:
                    score += div_scale * new[0] * freq[i][k2] / iteration
                mv = Move(i, k, k2, res[1], res[2], f_new, feasible)
                candidates.append((score, mv, new[0], src_parts, tuple(res[3:8])))

        chosen = None
        while chosen is None:
            for cand in candidates:
                score, mv = cand[0], cand[1]
                if tabu.is_tabu(mv.request, mv.target, iteration) and not is_aspirated(
                    mv, cand[2], best_cost, best_objective
                ):
                    continue
                if chosen is None or score < chosen[0]:
                    chosen = cand
            if chosen is None and not tabu.expire_oldest(iteration):
                break
        if chosen is None:
            break

        _, mv, _, src_parts, dst_parts = chosen
        cache.apply(mv, src_parts, dst_parts)
        tabu.add(mv.request, mv.source, iteration, tenure)
        freq[mv.request][mv.target] += 1
        touched.update((mv.source, mv.target))
        penalties = update_penalties(penalties, cache.totals()[1:])
        note(clock.ms())

        if iteration % config.intensification_period == 0:
            for k in sorted(touched):
                _improve_route(cache, k, penalties.coefficients)
            touched.clear()
            note(clock.ms())

    if not has_moves:
        for k in range(m):
            _improve_route(cache, k, penalties.coefficients)
        note(clock.ms())

    end_ms = clock.ms()
    tot = cache.totals()
    trace.record(end_ms, best_cost, penalized(tot, penalties.coefficients),
                 all(x <= TOL for x in tot[1:]))
    best = Solution.from_sequences(instance, best_routes) if best_routes is not None else None
    return SearchResult(best, best_cost, trace, iteration, kernel.evaluations, instance)
