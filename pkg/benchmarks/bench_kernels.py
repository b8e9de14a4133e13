"""Time the forcing kernels under both backends.

    python3 benchmarks/bench_kernels.py [--rows 2] [--cols 3] [--repeat 5]
    python3 benchmarks/bench_kernels.py --sweep

The default 2x3 grid has 729 conditions, about the largest poset worth
enumerating.  Best of ``repeat`` runs after one warm-up call.  ``--sweep``
times exists_above across grid sizes for both backends and the size-based
dispatch actually used, which is how DENSE_CUTOFF was chosen.
"""
import argparse
import time

import numpy as np

from deskforcing import _kernels
from deskforcing.forcing import FiniteGrid


def _time(fn, *args, repeat=5):
    fn(*args)  # compile / warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def sweep(repeat):
    impls = [_kernels.numpy_impl] + ([_kernels.numba_impl] if _kernels.numba_impl is not None else [])
    print(f"exists_above, microseconds per call (cutoff {_kernels.DENSE_CUTOFF})")
    print(f"{'grid':<8}{'n':>6}" + "".join(f"{i.name:>10}" for i in impls) + f"{'dispatch':>10}")
    for shape in [(1, 1), (1, 2), (1, 3), (2, 2), (1, 5), (2, 3)]:
        up = np.ascontiguousarray(FiniteGrid(*shape).up)
        s = np.random.default_rng(0).random(len(up)) < 0.3
        fns = [i.exists_above for i in impls] + [_kernels.exists_above]
        times = []
        for fn in fns:
            fn(up, s)
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                for _ in range(100):
                    fn(up, s)
                best = min(best, (time.perf_counter() - t0) / 100)
            times.append(best)
        print(f"{shape[0]}x{shape[1]:<6}{len(up):>6}" + "".join(f"{t * 1e6:>10.1f}" for t in times))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=2)
    ap.add_argument("--cols", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweep", action="store_true", help="time across poset sizes instead")
    args = ap.parse_args()
    if args.sweep:
        sweep(args.repeat)
        return

    P = FiniteGrid(args.rows, args.cols)
    up = np.ascontiguousarray(P.up)
    rng = np.random.default_rng(0)
    s = rng.random(len(up)) < 0.3
    g = rng.random(len(up)) < 0.5
    masks = np.array([(1 << a) | (1 << b) for a in range(12) for b in range(a + 1, 12)][:40], dtype=np.int64)

    impls = [_kernels.numpy_impl] + ([_kernels.numba_impl] if _kernels.numba_impl is not None else [])
    print(f"poset {P.describe()}: {len(up)} elements; active backend {_kernels.BACKEND}")
    print(f"{'kernel':<22}" + "".join(f"{i.name:>12}" for i in impls))
    rows = [
        ("exists_above", lambda i: _time(i.exists_above, up, s, repeat=args.repeat)),
        ("forall_above", lambda i: _time(i.forall_above, up, s, repeat=args.repeat)),
        ("forall_exists_above", lambda i: _time(i.forall_exists_above, up, g, s, repeat=args.repeat)),
        ("upward_closed", lambda i: _time(i.upward_closed, up, s, repeat=args.repeat)),
        ("delta_search m=5", lambda i: _time(i.delta_search, masks, 5, -1, repeat=args.repeat)),
    ]
    for label, run in rows:
        print(f"{label:<22}" + "".join(f"{run(i) * 1e3:>10.3f}ms" for i in impls))


if __name__ == "__main__":
    main()
