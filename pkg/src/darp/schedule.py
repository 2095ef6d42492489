"""Route scheduling, constraint violations and the penalized objective."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from . import _pykernel
from .model import Instance, Route

TOL = 1e-6


class EvaluationLevel(enum.IntEnum):
    """How much of the staged scheduling procedure runs.

    LEVEL1 only sweeps forward from the earliest depot departure (window
    lateness). LEVEL2 also delays the depot departure to cut route duration.
    LEVEL3 additionally delays each pickup to cut ride times.
    """

    LEVEL1 = 1
    LEVEL2 = 2
    LEVEL3 = 3


class RouteContractError(ValueError):
    pass


@dataclass(frozen=True)
class RouteEvaluation:
    vertices: Tuple[int, ...]  # with depot sentinels at both ends
    arrival: Tuple[float, ...]
    wait: Tuple[float, ...]
    service_start: Tuple[float, ...]
    departure: Tuple[float, ...]
    ride_times: Dict[int, float]
    cost: float
    duration: float
    peak_load: int
    load_excess: float
    duration_excess: float
    window_lateness: float
    ride_excess: float

    @property
    def violations(self) -> Tuple[float, float, float, float]:
        return (self.load_excess, self.duration_excess, self.window_lateness, self.ride_excess)

    @property
    def feasible(self) -> bool:
        return all(v <= TOL for v in self.violations)


def check_route(instance: Instance, sequence: Sequence[int]) -> None:
    n = instance.n_requests
    seen = set()
    for v in sequence:
        if not 1 <= v <= 2 * n:
            raise RouteContractError(f"vertex {v} is not a request vertex")
        if v in seen:
            raise RouteContractError(f"vertex {v} appears twice")
        if v > n and v - n not in seen:
            raise RouteContractError(f"drop-off {v} without an earlier pickup {v - n}")
        seen.add(v)
    for v in seen:
        if v <= n and v + n not in seen:
            raise RouteContractError(f"pickup {v} without its drop-off {v + n}")


def evaluate_route(
    instance: Instance,
    route,
    level: EvaluationLevel = EvaluationLevel.LEVEL3,
    ride_aware: bool = True,
) -> RouteEvaluation:
    """Schedule one route and measure its cost and violations.

    ``route`` is a :class:`Route` or a bare vertex sequence without depots.
    With ``ride_aware`` the forward time slack is also capped by the remaining
    ride-time allowance of passengers already on board.
    """
    seq = list(route.vertices if isinstance(route, Route) else route)
    check_route(instance, seq)
    kernel = _pykernel.Kernel(instance, ride_aware)
    s = kernel.schedule(seq, int(level))
    return RouteEvaluation(
        vertices=tuple(s["vertices"]),
        arrival=tuple(s["arrival"]),
        wait=tuple(s["wait"]),
        service_start=tuple(s["start"]),
        departure=tuple(s["depart"]),
        ride_times=s["rides"],
        cost=s["cost"],
        duration=s["duration"],
        peak_load=s["peak_load"],
        load_excess=s["load_excess"],
        duration_excess=s["duration_excess"],
        window_lateness=s["lateness"],
        ride_excess=s["ride_excess"],
    )


def violations(evaluations: Iterable[RouteEvaluation]) -> Tuple[float, float, float, float]:
    """Solution totals (q, d, w, t) summed over routes."""
    q = d = w = t = 0.0
    for ev in evaluations:
        q += ev.load_excess
        d += ev.duration_excess
        w += ev.window_lateness
        t += ev.ride_excess
    return q, d, w, t


def objective(cost: float, viol: Sequence[float], penalties: Sequence[float]) -> float:
    """Penalized objective ``c + alpha*q + beta*d + gamma*w + tau*t``."""
    if len(penalties) != 4 or any(p <= 0 for p in penalties):
        raise ValueError(f"penalties must be four positive numbers, got {tuple(penalties)}")
    alpha, beta, gamma, tau = penalties
    q, d, w, t = viol
    return cost + alpha * q + beta * d + gamma * w + tau * t


def evaluate_solution(
    instance: Instance,
    routes: Sequence,
    level: EvaluationLevel = EvaluationLevel.LEVEL3,
    ride_aware: bool = True,
) -> Tuple[float, Tuple[float, float, float, float], List[RouteEvaluation]]:
    """Total cost, violation totals and per-route evaluations."""
    evals = [evaluate_route(instance, r, level, ride_aware) for r in routes]
    return sum(ev.cost for ev in evals), violations(evals), evals


def is_feasible(viol: Sequence[float], tol: float = TOL) -> bool:
    return all(v <= tol for v in viol)
