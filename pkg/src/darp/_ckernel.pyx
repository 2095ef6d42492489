# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled route kernel; mirrors ``_pykernel.Kernel`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double INF = float("inf")


cdef struct Result:
    double cost
    double q
    double d
    double w
    double t


cdef class Kernel:
    cdef readonly str backend
    cdef double[:, ::1] travel
    cdef double[::1] early, late, service
    cdef long[::1] load
    cdef readonly int n
    cdef readonly double capacity, max_duration, max_ride
    cdef readonly bint ride_aware
    cdef public long long evaluations
    cdef public long long work
    cdef int cap
    cdef int *pos
    cdef int *v
    cdef int *cand
    cdef double *A
    cdef double *W
    cdef double *B
    cdef double *D

    def __cinit__(self, instance, ride_aware=False):
        cdef int i
        self.backend = "cython"
        self.n = instance.n_requests
        self.travel = np.array(instance.travel, dtype=np.float64, order="C")
        verts = instance.vertices
        self.early = np.array([vx.window_earliest for vx in verts], dtype=np.float64)
        self.late = np.array([vx.window_latest for vx in verts], dtype=np.float64)
        self.service = np.array([vx.service_duration for vx in verts], dtype=np.float64)
        self.load = np.array([vx.load_change for vx in verts], dtype=np.int_)
        self.capacity = float(instance.vehicle_capacity)
        self.max_duration = float(instance.max_route_duration)
        self.max_ride = float(instance.max_ride_time)
        self.ride_aware = bool(ride_aware)
        self.evaluations = 0
        self.work = 0
        self.cap = 2 * self.n + 4
        self.pos = <int *> malloc(self.cap * sizeof(int))
        self.v = <int *> malloc(self.cap * sizeof(int))
        self.cand = <int *> malloc(self.cap * sizeof(int))
        self.A = <double *> malloc(self.cap * sizeof(double))
        self.W = <double *> malloc(self.cap * sizeof(double))
        self.B = <double *> malloc(self.cap * sizeof(double))
        self.D = <double *> malloc(self.cap * sizeof(double))
        if not (self.pos and self.v and self.cand and self.A and self.W and self.B and self.D):
            raise MemoryError()
        for i in range(self.cap):
            self.pos[i] = -1

    def __dealloc__(self):
        free(self.pos); free(self.v); free(self.cand)
        free(self.A); free(self.W); free(self.B); free(self.D)

    cdef inline void _sweep(self, int size, int start) nogil:
        cdef int k, u
        cdef double a, b
        self.work += size - start - 1
        for k in range(start + 1, size):
            u = self.v[k]
            a = self.D[k - 1] + self.travel[self.v[k - 1], u]
            b = a if a > self.early[u] else self.early[u]
            self.A[k] = a
            self.B[k] = b
            self.W[k] = b - a
            self.D[k] = b + self.service[u]

    cdef inline double _slack(self, int size, int i) nogil:
        cdef double best = INF, cum = 0.0, room, ride_room, term
        cdef int k, u, pk
        self.work += size - i
        for k in range(i, size):
            if k > i:
                cum += self.W[k]
            u = self.v[k]
            room = self.late[u] - self.B[k]
            if self.ride_aware:
                ride_room = INF
                if u > self.n:
                    pk = self.pos[u - self.n]
                    if pk >= 0 and pk < i:
                        ride_room = self.max_ride - (self.B[k] - self.D[pk])
                if ride_room < room:
                    room = ride_room
            term = cum + (room if room > 0.0 else 0.0)
            if term < best:
                best = term
        return best

    cdef Result _eval(self, int *seq, int r, int level) nogil:
        cdef int size = r + 2, k, j, u, pk, onboard = 0, peak = 0
        cdef double e0 = self.early[0], f0, waiting, shift, fj, after, extra, over, ride
        cdef Result res
        self.evaluations += 1
        self.work += size
        self.v[0] = 0
        self.v[size - 1] = 0
        for k in range(r):
            self.v[k + 1] = seq[k]
            self.pos[seq[k]] = k + 1
        self.A[0] = e0; self.B[0] = e0; self.D[0] = e0
        self._sweep(size, 0)
        if level >= 2 and size > 2:
            f0 = self._slack(size, 0)
            waiting = 0.0
            for k in range(1, size - 1):
                waiting += self.W[k]
            shift = f0 if f0 < waiting else waiting
            self.A[0] = e0 + shift; self.B[0] = e0 + shift; self.D[0] = e0 + shift
            self._sweep(size, 0)
            if level >= 3:
                for j in range(1, size - 1):
                    if self.v[j] < 1 or self.v[j] > self.n:
                        continue
                    fj = self._slack(size, j)
                    after = 0.0
                    for k in range(j + 1, size - 1):
                        after += self.W[k]
                    extra = fj if fj < after else after
                    if extra > 0.0:
                        self.W[j] += extra
                        self.B[j] = self.A[j] + self.W[j]
                        self.D[j] = self.B[j] + self.service[self.v[j]]
                        self._sweep(size, j)
        # measure
        res.cost = 0.0
        res.w = 0.0
        res.t = 0.0
        for k in range(1, size):
            res.cost += self.travel[self.v[k - 1], self.v[k]]
        for k in range(1, size - 1):
            u = self.v[k]
            over = self.B[k] - self.late[u]
            if over > 0.0:
                res.w += over
            if u <= self.n:
                if self.pos[u + self.n] > k:
                    onboard += self.load[u]
            else:
                pk = self.pos[u - self.n]
                if pk >= 0 and pk < k:
                    onboard += self.load[u]
                    ride = self.B[k] - self.D[pk]
                    if ride > self.max_ride:
                        res.t += ride - self.max_ride
            if onboard > peak:
                peak = onboard
        res.q = peak - self.capacity
        if res.q < 0.0:
            res.q = 0.0
        res.d = (self.B[size - 1] - self.D[0]) - self.max_duration
        if res.d < 0.0:
            res.d = 0.0
        for k in range(r):
            self.pos[seq[k]] = -1
        return res

    cdef int _load_seq(self, seq) except -1:
        cdef int r = len(seq), k
        if r + 2 > self.cap:
            raise ValueError("route longer than instance allows")
        for k in range(r):
            self.cand[k] = seq[k]
        return r

    def evaluate(self, seq, int level):
        cdef int r = self._load_seq(seq)
        cdef Result res = self._eval(self.cand, r, level)
        return res.cost, res.q, res.d, res.w, res.t

    def best_insertion(self, seq, int pickup, bint two_step, int level,
                       double alpha, double beta, double gamma, double tau):
        cdef int r = len(seq), a, b, c, k, fixed = 0, first, drop = pickup + self.n
        cdef int best_a = 0, best_b = 1
        cdef long long before = self.evaluations
        cdef double f, best_f = INF, fixed_f = INF
        cdef Result res, best_res
        cdef int *base
        cdef int *buf
        cdef bint pick_critical
        if r + 4 > self.cap:
            raise ValueError("route longer than instance allows")
        base = <int *> malloc((r + 2) * sizeof(int))
        buf = <int *> malloc((r + 2) * sizeof(int))
        if not base or not buf:
            free(base); free(buf)
            raise MemoryError()
        for k in range(r):
            base[k] = seq[k]
        best_res.cost = 0.0; best_res.q = 0.0; best_res.d = 0.0; best_res.w = 0.0; best_res.t = 0.0
        with nogil:
            if not two_step:
                for a in range(r + 1):
                    for b in range(a + 1, r + 2):
                        _place2(base, r, a, pickup, b, drop, buf)
                        res = self._eval(buf, r + 2, level)
                        f = res.cost + alpha * res.q + beta * res.d + gamma * res.w + tau * res.t
                        if f < best_f:
                            best_f = f; best_a = a; best_b = b; best_res = res
            else:
                pick_critical = (self.late[pickup] - self.early[pickup]) <= (
                    self.late[drop] - self.early[drop])
                first = pickup if pick_critical else drop
                for c in range(r + 1):
                    _place1(base, r, c, first, buf)
                    res = self._eval(buf, r + 1, level)
                    f = res.cost + alpha * res.q + beta * res.d + gamma * res.w + tau * res.t
                    if f < fixed_f:
                        fixed_f = f; fixed = c
                if pick_critical:
                    for b in range(fixed + 1, r + 2):
                        _place2(base, r, fixed, pickup, b, drop, buf)
                        res = self._eval(buf, r + 2, level)
                        f = res.cost + alpha * res.q + beta * res.d + gamma * res.w + tau * res.t
                        if f < best_f:
                            best_f = f; best_a = fixed; best_b = b; best_res = res
                else:
                    for a in range(fixed + 1):
                        _place2(base, r, a, pickup, fixed + 1, drop, buf)
                        res = self._eval(buf, r + 2, level)
                        f = res.cost + alpha * res.q + beta * res.d + gamma * res.w + tau * res.t
                        if f < best_f:
                            best_f = f; best_a = a; best_b = fixed + 1; best_res = res
        free(base); free(buf)
        return (best_f, best_a, best_b, best_res.cost, best_res.q, best_res.d,
                best_res.w, best_res.t, self.evaluations - before)


cdef inline void _place1(int *base, int r, int c, int x, int *out) nogil:
    cdef int k, j = 0
    for k in range(r + 1):
        if k == c:
            out[j] = x
            j += 1
        if k < r:
            out[j] = base[k]
            j += 1


cdef inline void _place2(int *base, int r, int a, int p, int b, int d, int *out) nogil:
    # pickup p lands at index a and drop-off d at index b of the (r + 2)-long result
    cdef int k = 0, j
    for j in range(r + 2):
        if j == a:
            out[j] = p
        elif j == b:
            out[j] = d
        else:
            out[j] = base[k]
            k += 1
