"""Random instances shaped like the standard benchmark set, for tests and demos."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import Instance, Vertex


@dataclass(frozen=True)
class GenParams:
    side: float = 20.0  # coordinates uniform in [-side/2, side/2]^2
    horizon: float = 1440.0
    capacity: int = 6
    max_ride_time: float = 90.0
    max_route_duration: float = 480.0
    service_duration: float = 3.0
    width_min: float = 15.0
    width_max: float = 15.0
    # narrow windows open somewhere in [window_open_min, window_open_max]
    window_open_min: float = 60.0
    window_open_max: float = 1260.0


def generate(n: int, m: int, seed: int, params: GenParams = GenParams()) -> Instance:
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    rng = random.Random(seed)
    half = params.side / 2.0
    T = params.horizon

    def coord():
        return round(rng.uniform(-half, half), 3)

    depot = Vertex(0, 0.0, 0.0, 0.0, 0, 0.0, T)
    pickups, drops = [], []
    for i in range(1, n + 1):
        px, py, dx, dy = coord(), coord(), coord(), coord()
        width = round(rng.uniform(params.width_min, params.width_max))
        opens = float(round(rng.uniform(params.window_open_min, params.window_open_max)))
        narrow = (opens, min(opens + width, T))
        wide = (0.0, T)
        # outbound requests constrain the pickup, inbound ones the drop-off
        pick_win, drop_win = (narrow, wide) if rng.random() < 0.5 else (wide, narrow)
        s = params.service_duration
        pickups.append(Vertex(i, px, py, s, 1, *pick_win))
        drops.append(Vertex(i + n, dx, dy, s, -1, *drop_win))
    return Instance(
        n_requests=n,
        n_vehicles=m,
        vehicle_capacity=params.capacity,
        max_route_duration=params.max_route_duration,
        max_ride_time=params.max_ride_time,
        vertices=[depot] + pickups + drops,
        horizon=T,
        name=f"gen-n{n}-m{m}-s{seed}",
    )
