"""Pure-Python route kernel.

Reference implementation of the hot loops; ``_ckernel.pyx`` mirrors it
operation for operation so both backends produce bit-identical floats.

Route sequences exclude the depot, which is implied at both ends. Internally
position 0 is the start depot and position ``r + 1`` the end depot.
"""

from __future__ import annotations

INF = float("inf")


class Kernel:
    backend = "python"

    def __init__(self, instance, ride_aware: bool = False):
        n = instance.n_requests
        self.n = n
        self.travel = [list(map(float, row)) for row in instance.travel]
        self.early = [float(v.window_earliest) for v in instance.vertices]
        self.late = [float(v.window_latest) for v in instance.vertices]
        self.service = [float(v.service_duration) for v in instance.vertices]
        self.load = [int(v.load_change) for v in instance.vertices]
        self.capacity = float(instance.vehicle_capacity)
        self.max_duration = float(instance.max_route_duration)
        self.max_ride = float(instance.max_ride_time)
        self.ride_aware = bool(ride_aware)
        self.evaluations = 0
        self.work = 0  # vertex steps, a deterministic proxy for time
        self._pos = [-1] * (2 * n + 1)

    # -- schedule ---------------------------------------------------------

    def _sweep(self, v, A, W, B, D, start):
        t, e, s = self.travel, self.early, self.service
        self.work += len(v) - start - 1
        for k in range(start + 1, len(v)):
            a = D[k - 1] + t[v[k - 1]][v[k]]
            b = a if a > e[v[k]] else e[v[k]]
            A[k] = a
            B[k] = b
            W[k] = b - a
            D[k] = b + s[v[k]]

    def _slack(self, v, W, B, D, i, pos):
        n, late, L = self.n, self.late, self.max_ride
        best = INF
        cum = 0.0
        self.work += len(v) - i
        for k in range(i, len(v)):
            if k > i:
                cum += W[k]
            room = late[v[k]] - B[k]
            if self.ride_aware:
                u = v[k]
                ride_room = INF
                if u > n:
                    pk = pos[u - n]
                    if 0 <= pk < i:
                        ride_room = L - (B[k] - D[pk])
                if ride_room < room:
                    room = ride_room
            term = cum + (room if room > 0.0 else 0.0)
            if term < best:
                best = term
        return best

    def _schedule(self, seq, level):
        """Run the staged procedure; returns (v, A, W, B, D, pos)."""
        n = self.n
        v = [0] + list(seq) + [0]
        size = len(v)
        self.work += size
        A = [0.0] * size
        W = [0.0] * size
        B = [0.0] * size
        D = [0.0] * size
        pos = self._pos
        for k in range(1, size - 1):
            pos[v[k]] = k
        e0 = self.early[0]
        A[0] = B[0] = D[0] = e0
        self._sweep(v, A, W, B, D, 0)
        if level >= 2 and size > 2:
            f0 = self._slack(v, W, B, D, 0, pos)
            waiting = 0.0
            for k in range(1, size - 1):
                waiting += W[k]
            shift = f0 if f0 < waiting else waiting
            A[0] = B[0] = D[0] = e0 + shift
            self._sweep(v, A, W, B, D, 0)
            if level >= 3:
                s = self.service
                for j in range(1, size - 1):
                    if not 1 <= v[j] <= n:
                        continue
                    fj = self._slack(v, W, B, D, j, pos)
                    after = 0.0
                    for k in range(j + 1, size - 1):
                        after += W[k]
                    extra = fj if fj < after else after
                    if extra > 0.0:
                        W[j] += extra
                        B[j] = A[j] + W[j]
                        D[j] = B[j] + s[v[j]]
                        self._sweep(v, A, W, B, D, j)
        return v, A, W, B, D

    def _measure(self, v, B, D):
        """(cost, load_excess, duration_excess, lateness, ride_excess, peak)."""
        n, t, late, pos = self.n, self.travel, self.late, self._pos
        size = len(v)
        cost = 0.0
        lateness = 0.0
        ride_excess = 0.0
        peak = 0
        onboard = 0
        for k in range(1, size):
            cost += t[v[k - 1]][v[k]]
        for k in range(1, size - 1):
            u = v[k]
            over = B[k] - late[u]
            if over > 0.0:
                lateness += over
            if u <= n:
                if pos[u + n] > k:
                    onboard += self.load[u]
            else:
                pk = pos[u - n]
                if 0 <= pk < k:
                    onboard += self.load[u]
                    ride = B[k] - D[pk]
                    if ride > self.max_ride:
                        ride_excess += ride - self.max_ride
            if onboard > peak:
                peak = onboard
        duration = B[size - 1] - D[0]
        load_excess = peak - self.capacity
        if load_excess < 0.0:
            load_excess = 0.0
        duration_excess = duration - self.max_duration
        if duration_excess < 0.0:
            duration_excess = 0.0
        return cost, load_excess, duration_excess, lateness, ride_excess, peak, duration

    def _clear(self, v):
        pos = self._pos
        for k in range(1, len(v) - 1):
            pos[v[k]] = -1

    def evaluate(self, seq, level):
        """Return (cost, load_excess, duration_excess, lateness, ride_excess)."""
        self.evaluations += 1
        v, A, W, B, D = self._schedule(seq, level)
        out = self._measure(v, B, D)
        self._clear(v)
        return out[:5]

    def schedule(self, seq, level):
        """Full schedule detail for one route, as a dict of plain lists."""
        self.evaluations += 1
        v, A, W, B, D = self._schedule(seq, level)
        cost, q, d, w, t, peak, duration = self._measure(v, B, D)
        n, pos = self.n, self._pos
        rides = {}
        for k in range(1, len(v) - 1):
            u = v[k]
            if u > n and 0 <= pos[u - n] < k:
                rides[u - n] = B[k] - D[pos[u - n]]
        self._clear(v)
        return dict(
            vertices=v, arrival=A, wait=W, start=B, depart=D, rides=rides,
            cost=cost, load_excess=q, duration_excess=d, lateness=w, ride_excess=t,
            peak_load=peak, duration=duration,
        )  # fmt: skip

    # -- insertion scans --------------------------------------------------

    def _score(self, seq, level, alpha, beta, gamma, tau):
        c, q, d, w, t = self.evaluate(seq, level)
        return c + alpha * q + beta * d + gamma * w + tau * t, (c, q, d, w, t)

    def best_insertion(self, seq, pickup, two_step, level, alpha, beta, gamma, tau):
        """Best placement of request ``pickup`` into ``seq``.

        Returns ``(f, pickup_pos, dropoff_pos, cost, q, d, w, t, evaluations)``
        with positions indexing the resulting route. Ties keep the first
        candidate in scan order.
        """
        seq = list(seq)
        r = len(seq)
        drop = pickup + self.n
        before = self.evaluations
        best_f = INF
        best = None
        if not two_step:
            for a in range(r + 1):
                base = seq[:a] + [pickup] + seq[a:]
                for b in range(a + 1, r + 2):
                    cand = base[:b] + [drop] + base[b:]
                    f, parts = self._score(cand, level, alpha, beta, gamma, tau)
                    if f < best_f:
                        best_f, best = f, (a, b, parts)
        else:
            pick_critical = (self.late[pickup] - self.early[pickup]) <= (
                self.late[drop] - self.early[drop]
            )
            first = pickup if pick_critical else drop
            fixed_f = INF
            fixed = 0
            for c in range(r + 1):
                cand = seq[:c] + [first] + seq[c:]
                f, _ = self._score(cand, level, alpha, beta, gamma, tau)
                if f < fixed_f:
                    fixed_f, fixed = f, c
            base = seq[:fixed] + [first] + seq[fixed:]
            if pick_critical:
                for b in range(fixed + 1, r + 2):
                    cand = base[:b] + [drop] + base[b:]
                    f, parts = self._score(cand, level, alpha, beta, gamma, tau)
                    if f < best_f:
                        best_f, best = f, (fixed, b, parts)
            else:
                for a in range(fixed + 1):
                    cand = base[:a] + [pickup] + base[a:]
                    f, parts = self._score(cand, level, alpha, beta, gamma, tau)
                    if f < best_f:
                        best_f, best = f, (a, fixed + 1, parts)
        a, b, parts = best
        return (best_f, a, b) + tuple(parts) + (self.evaluations - before,)
