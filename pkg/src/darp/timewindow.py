"""Tightening the wide window of each request from its narrow twin."""

from __future__ import annotations

import enum
from dataclasses import replace

from .model import Instance


class Critical(enum.Enum):
    PICKUP = "pickup"
    DROPOFF = "dropoff"


class InfeasibleRequestError(ValueError):
    def __init__(self, request: int, earliest: float, latest: float):
        self.request = request
        super().__init__(
            f"request {request}: tightened window [{earliest}, {latest}] is empty"
        )


def classify_critical(instance: Instance, request: int) -> Critical:
    """The vertex with the narrower window is critical; equal widths favour the pickup."""
    if not 1 <= request <= instance.n_requests:
        raise ValueError(f"request {request} outside 1..{instance.n_requests}")
    pick, drop = instance.pickup(request), instance.dropoff(request)
    if pick.window_width <= drop.window_width:
        return Critical.PICKUP
    return Critical.DROPOFF


def adjust_windows(instance: Instance) -> Instance:
    """Shrink every non-critical window to what the critical one, service time and ride bound allow.

    A request whose drop-off is critical gets the pickup window
    ``[max(e_p, e_d - s_p - L), min(l_p, l_d - s_p)]``; one whose pickup is
    critical gets the drop-off window ``[max(e_d, e_p + s_p), min(l_d, l_p + s_p + L)]``.
    Ride time is measured from departure at the pickup.
    """
    n, L = instance.n_requests, instance.max_ride_time
    verts = list(instance.vertices)
    for i in range(1, n + 1):
        pick, drop = verts[i], verts[i + n]
        s = pick.service_duration
        if classify_critical(instance, i) is Critical.DROPOFF:
            e = max(pick.window_earliest, drop.window_earliest - s - L)
            l = min(pick.window_latest, drop.window_latest - s)
            target = i
        else:
            e = max(drop.window_earliest, pick.window_earliest + s)
            l = min(drop.window_latest, pick.window_latest + s + L)
            target = i + n
        if e > l:
            raise InfeasibleRequestError(i, e, l)
        verts[target] = replace(verts[target], window_earliest=e, window_latest=l)
    return instance.replace(vertices=verts)
