"""Core domain types: vertices, instances, routes and solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float
    service_duration: float
    load_change: int
    window_earliest: float
    window_latest: float

    @property
    def window_width(self) -> float:
        return self.window_latest - self.window_earliest


def euclidean_matrix(vertices: Sequence[Vertex]) -> np.ndarray:
    xy = np.array([(v.x, v.y) for v in vertices], dtype=float).reshape(-1, 2)
    diff = xy[:, None, :] - xy[None, :, :]
    travel = np.sqrt((diff ** 2).sum(axis=-1))
    travel.setflags(write=False)
    return travel


class Instance:
    """Immutable DARP instance.

    Vertex 0 is the depot, vertices ``1..n`` are pickups and ``n+1..2n`` the
    matching drop-offs. Fleet bounds are uniform across vehicles. The travel
    matrix doubles as the cost matrix.
    """

    __slots__ = (
        "name",
        "n_requests",
        "n_vehicles",
        "vehicle_capacity",
        "max_route_duration",
        "max_ride_time",
        "horizon",
        "vertices",
        "travel",
    )

    def __init__(
        self,
        n_requests: int,
        n_vehicles: int,
        vehicle_capacity: float,
        max_route_duration: float,
        max_ride_time: float,
        vertices: Sequence[Vertex],
        horizon: Optional[float] = None,
        travel: Optional[np.ndarray] = None,
        name: str = "",
    ):
        vertices = tuple(vertices)
        if horizon is None:
            horizon = vertices[0].window_latest if vertices else 0.0
        if travel is None:
            travel = euclidean_matrix(vertices)
        else:
            travel = np.array(travel, dtype=float)
            travel.setflags(write=False)
        setattr_ = object.__setattr__
        setattr_(self, "name", name)
        setattr_(self, "n_requests", int(n_requests))
        setattr_(self, "n_vehicles", int(n_vehicles))
        setattr_(self, "vehicle_capacity", vehicle_capacity)
        setattr_(self, "max_route_duration", float(max_route_duration))
        setattr_(self, "max_ride_time", float(max_ride_time))
        setattr_(self, "horizon", float(horizon))
        setattr_(self, "vertices", vertices)
        setattr_(self, "travel", travel)
        self._check()

    def __setattr__(self, key, value):
        raise AttributeError("Instance is immutable")

    def __reduce__(self):
        # pickling goes through the constructor, so worker processes get a checked copy
        return (Instance, (self.n_requests, self.n_vehicles, self.vehicle_capacity,
                           self.max_route_duration, self.max_ride_time, self.vertices,
                           self.horizon, self.travel, self.name))

    def _check(self) -> None:
        n = self.n_requests
        if n < 0 or self.n_vehicles < 1:
            raise ValueError("need n_requests >= 0 and n_vehicles >= 1")
        if len(self.vertices) != 2 * n + 1:
            raise ValueError(
                f"expected {2 * n + 1} vertices for {n} requests, got {len(self.vertices)}"
            )
        if min(self.vehicle_capacity, self.max_route_duration, self.max_ride_time) <= 0:
            raise ValueError("capacity, route duration and ride time bounds must be positive")
        for idx, v in enumerate(self.vertices):
            if v.id != idx:
                raise ValueError(f"vertex at position {idx} has id {v.id}")
            if v.service_duration < 0:
                raise ValueError(f"vertex {idx}: negative service duration")
            if not 0 <= v.window_earliest <= v.window_latest <= self.horizon:
                raise ValueError(
                    f"vertex {idx}: window [{v.window_earliest}, {v.window_latest}] "
                    f"not inside [0, {self.horizon}]"
                )
        for i in range(1, n + 1):
            if self.vertices[i + n].load_change != -self.vertices[i].load_change:
                raise ValueError(f"request {i}: drop-off load does not negate pickup load")
        if self.travel.shape != (2 * n + 1, 2 * n + 1):
            raise ValueError("travel matrix shape does not match vertex count")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.n_requests == other.n_requests
            and self.n_vehicles == other.n_vehicles
            and self.vehicle_capacity == other.vehicle_capacity
            and self.max_route_duration == other.max_route_duration
            and self.max_ride_time == other.max_ride_time
            and self.horizon == other.horizon
            and self.vertices == other.vertices
            and np.array_equal(self.travel, other.travel)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"Instance(name={self.name!r}, n={self.n_requests}, m={self.n_vehicles}, "
            f"Q={self.vehicle_capacity}, T={self.max_route_duration}, L={self.max_ride_time})"
        )

    def pickup(self, request: int) -> Vertex:
        return self.vertices[request]

    def dropoff(self, request: int) -> Vertex:
        return self.vertices[request + self.n_requests]

    def request_of(self, vertex_id: int) -> int:
        return vertex_id if vertex_id <= self.n_requests else vertex_id - self.n_requests

    def is_pickup(self, vertex_id: int) -> bool:
        return 1 <= vertex_id <= self.n_requests

    def replace(self, **changes) -> "Instance":
        fields = dict(
            n_requests=self.n_requests,
            n_vehicles=self.n_vehicles,
            vehicle_capacity=self.vehicle_capacity,
            max_route_duration=self.max_route_duration,
            max_ride_time=self.max_ride_time,
            vertices=self.vertices,
            horizon=self.horizon,
            travel=self.travel,
            name=self.name,
        )
        fields.update(changes)
        return Instance(**fields)


@dataclass
class Route:
    vehicle_id: int
    vertices: List[int] = field(default_factory=list)

    def __len__(self):
        return len(self.vertices)

    def copy(self) -> "Route":
        return Route(self.vehicle_id, list(self.vertices))


@dataclass
class Solution:
    routes: List[Route]
    assignment: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, n_vehicles: int) -> "Solution":
        return cls([Route(k) for k in range(n_vehicles)], {})

    @classmethod
    def from_sequences(cls, instance: Instance, sequences: Sequence[Sequence[int]]) -> "Solution":
        n = instance.n_requests
        routes = [Route(k, list(seq)) for k, seq in enumerate(sequences)]
        assignment = {v: r.vehicle_id for r in routes for v in r.vertices if 1 <= v <= n}
        return cls(routes, assignment)

    def copy(self) -> "Solution":
        return Solution([r.copy() for r in self.routes], dict(self.assignment))

    @property
    def sequences(self) -> List[List[int]]:
        return [list(r.vertices) for r in self.routes]


@dataclass(frozen=True)
class Defect:
    request: int
    rule: str
    detail: str = ""


def validate_solution(instance: Instance, solution: Solution) -> List[Defect]:
    """Check the three basic constraints: pairing, precedence, complete assignment.

    Returns one defect per violation; an empty list means the solution is
    structurally valid.
    """
    n = instance.n_requests
    defects: List[Defect] = []
    where: Dict[int, tuple] = {}
    for route in solution.routes:
        for pos, v in enumerate(route.vertices):
            if not 1 <= v <= 2 * n:
                defects.append(Defect(0, "unknown_vertex", f"vertex {v} on vehicle {route.vehicle_id}"))
                continue
            if v in where:
                defects.append(Defect(instance.request_of(v), "duplicate", f"vertex {v} visited twice"))
                continue
            where[v] = (route.vehicle_id, pos)

    for i in range(1, n + 1):
        p, d = where.get(i), where.get(i + n)
        if p is None or d is None or i not in solution.assignment:
            defects.append(Defect(i, "unassigned", "request not fully served"))
            continue
        if p[0] != d[0]:
            defects.append(Defect(i, "same_route", f"pickup on {p[0]}, drop-off on {d[0]}"))
            continue
        if p[1] > d[1]:
            defects.append(Defect(i, "precedence", "drop-off visited before pickup"))
        if solution.assignment[i] != p[0]:
            defects.append(
                Defect(i, "assignment", f"assigned to {solution.assignment[i]}, served by {p[0]}")
            )
    return defects
