r"""
Compare the compiled convolution kernel with the pure-Python reference.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Each case is checked for identical output before it is timed.  The last
case is a real workload: the product of two index-36 basis forms.
"""

import argparse
import random
import time

from lkm3._kernels import BACKEND, conv2d_compiled, conv2d_python


def grid(rng, rows, cols, bits):
    lim = 1 << bits
    return [[rng.randrange(-lim, lim) for _ in range(cols)] for _ in range(rows)]


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    yield "10x40 small", grid(rng, 10, 40, 8), grid(rng, 10, 40, 8), 10
    yield "20x120 small", grid(rng, 20, 120, 8), grid(rng, 20, 120, 8), 20
    yield "10x73 40-bit", grid(rng, 10, 73, 40), grid(rng, 10, 73, 40), 10
    yield "6x40 200-bit", grid(rng, 6, 40, 200), grid(rng, 6, 40, 200), 6


def basis_case():
    from math import gcd

    from lkm3.jacobiforms import _step, _to_grid
    from lkm3.paperdata import load_dataset
    from lkm3.reflective import build_basis

    f, g = build_basis(36, load_dataset()).forms[:2]
    keys = list(f._terms) + list(g._terms)
    v = min(k for k, _ in keys)
    sn = _step((k for k, _ in keys), v)
    sl = gcd(*(_step((j for _, j in h._terms), min(j for _, j in h._terms)) for h in (f, g)))

    def as_grid(h):
        return _to_grid(h, v, min(j for _, j in h._terms), sn, sl, 10**6)[0]

    a, b = as_grid(f), as_grid(g)
    return "t=36 xi1*xi2", a, b, min(len(a), len(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--no-forms", action="store_true", help="skip the case built from basis forms")
    args = ap.parse_args()
    if BACKEND != "compiled":
        raise SystemExit("compiled kernel not available (LKM3_PURE set or extension not built)")
    rng = random.Random(args.seed)
    all_cases = list(cases(rng))
    if not args.no_forms:
        all_cases.append(basis_case())
    print(f"{'case':<16} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, a, b, n in all_cases:
        if conv2d_python(a, b, n) != conv2d_compiled(a, b, n):
            raise SystemExit(f"{name}: kernels disagree")
        tp = best(lambda: conv2d_python(a, b, n), args.repeat)
        tc = best(lambda: conv2d_compiled(a, b, n), args.repeat)
        print(f"{name:<16} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
