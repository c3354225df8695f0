"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_backends.py [--repeat 5] [--size 20000]

Both paths are called directly, so the comparison does not depend on
CYLFRAC_DISABLE_NUMBA.  If that flag is set the "numba" column runs the
plain-Python loop instead (much slower); the script says so.
"""
import argparse
import timeit

import numpy as np

from cylfrac import _accel, fowler, specfun


def _best(fn, repeat):
    fn()  # warm-up / JIT compile
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(size, rng):
    z = rng.uniform(0.1, 20, size) + 1j * rng.uniform(-30, 30, size)
    x = rng.uniform(0.0, 0.1, size)
    v0 = 1 + rng.uniform(0.001, 0.2, 64)
    w0 = np.zeros_like(v0)
    c, p = (3 - 2) ** 2 / 4, 5.0
    return {
        "loggamma": (lambda: specfun._lgamma_loop(z), lambda: specfun._lgamma_vec(z)),
        "hyp2f1_conjugate_pair": (
            lambda: specfun.hyp2f1_conjugate_pair(0.25, 4.0, 1.5, x, use_numba=True),
            lambda: specfun.hyp2f1_conjugate_pair(0.25, 4.0, 1.5, x, use_numba=False)),
        "rk4_batch (64 orbits x 5000 steps)": (
            lambda: fowler._rk4_loop(v0, w0, c, p, 1e-3, 5000, 50.0),
            lambda: fowler._rk4_vec(v0, w0, c, p, 1e-3, 5000, 50.0)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _accel.USE_NUMBA:
        print("note: numba disabled, the first column is the pure-Python loop")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':40s} {'numba [s]':>12s} {'numpy [s]':>12s} {'speedup':>9s}")
    for name, (fast, slow) in cases(args.size, rng).items():
        a, b = _best(fast, args.repeat), _best(slow, args.repeat)
        print(f"{name:40s} {a:12.5f} {b:12.5f} {b / a:9.2f}")


if __name__ == "__main__":
    main()
