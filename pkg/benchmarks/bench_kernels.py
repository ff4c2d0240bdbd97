"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 3] [--iterations 1000000]

Times the quadrature oracle over the Gaussian acceptance grid and the literal
composition recursion over the default alpha grid, once per backend.
"""
import argparse
import time

from alphadp import _backend
from alphadp.accounting import compose_adp_literal
from alphadp.divergence import DensitySpec, log_alpha_moment_quadrature
from alphadp.optimizer import AlphaSearchConfig

ALPHAS = (1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
SCALES = (0.5, 1.0, 10.0, 100.0)
SHIFTS = (0.1, 0.5, 1.0, 2.0)


def quadrature_grid():
    for a in ALPHAS:
        for s in SCALES:
            for mu in SHIFTS:
                log_alpha_moment_quadrature(DensitySpec.gaussian(mu, s), DensitySpec.gaussian(0.0, s), a)


def recursion_grid(iterations):
    for a in AlphaSearchConfig().alpha_grid():
        compose_adp_literal(1e-6, iterations, a)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--iterations", type=int, default=10**6,
                    help="recursion length (python backend runs 1/100 of it and is scaled up)")
    args = ap.parse_args()

    rows = []
    for backend in _backend.available_backends():
        _backend.use_backend(backend)
        q = best_of(quadrature_grid, args.repeat)
        # the interpreted loop is too slow for the full length; time a slice and scale
        n = args.iterations if backend == "cython" else max(1, args.iterations // 100)
        r = best_of(lambda: recursion_grid(n), 1) * (args.iterations / n)
        rows.append((backend, q, r))

    print(f"{'backend':<8} {'quadrature [s]':>15} {'recursion [s]':>15}")
    for backend, q, r in rows:
        print(f"{backend:<8} {q:>15.4f} {r:>15.4f}")
    if len(rows) == 2:
        (_, cq, cr), (_, pq, pr) = rows
        print(f"speedup  {pq / cq:>14.1f}x {pr / cr:>14.1f}x")


if __name__ == "__main__":
    main()
