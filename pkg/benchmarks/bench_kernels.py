"""Time the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_kernels.py [--n 48] [--m 5] [--repeat 5]

Three workloads: full Level3 route evaluation, one-step best insertion and
two-step best insertion. Both backends see identical routes; the script also
checks that they return identical numbers before timing anything.
"""

import argparse
import random
import statistics
import sys
import time

from darp.construction import construct_random
from darp.instgen import generate
from darp.kernels import BACKENDS, make_kernel


def workloads(kernel, routes, n, rng_seed=0):
    rng = random.Random(rng_seed)
    picks = [(seq, rng.randint(1, n)) for seq in routes for _ in range(5)]
    picks = [(seq, i) for seq, i in picks if i not in seq]

    def evaluate():
        for seq in routes:
            kernel.evaluate(seq, 3)

    def one_step():
        for seq, i in picks:
            kernel.best_insertion(seq, i, False, 3, 1.0, 1.0, 1.0, 1.0)

    def two_step():
        for seq, i in picks:
            kernel.best_insertion(seq, i, True, 3, 1.0, 1.0, 1.0, 1.0)

    return {"evaluate": evaluate, "one-step": one_step, "two-step": two_step}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=48)
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    inst = generate(args.n, args.m, args.seed)
    routes = [s for s in construct_random(inst, args.seed).sequences if s] * 20
    if "cython" not in BACKENDS:
        print("compiled kernel not built; timing the Python backend only", file=sys.stderr)

    kernels = {name: make_kernel(inst, backend=name) for name in sorted(BACKENDS)}
    ref = None
    for name, k in kernels.items():
        out = [k.evaluate(seq, 3) for seq in routes[:5]]
        if ref is not None and out != ref:
            print(f"backend {name} disagrees with the reference", file=sys.stderr)
            return 1
        ref = out

    print(f"n={args.n} m={args.m} routes={len(routes)} repeat={args.repeat}")
    print(f"{'workload':<10} {'backend':<8} {'best s':>9} {'median s':>9} {'speedup':>8}")
    for wl in ("evaluate", "one-step", "two-step"):
        base = None
        for name in ("python", "cython"):
            if name not in kernels:
                continue
            best, med = best_of(workloads(kernels[name], routes, args.n)[wl], args.repeat)
            base = base or best
            print(f"{wl:<10} {name:<8} {best:9.4f} {med:9.4f} {base / best:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
