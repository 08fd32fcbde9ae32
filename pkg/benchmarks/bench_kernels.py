"""Benchmark the compiled kernel core against the pure-NumPy fallback.

    python benchmarks/bench_kernels.py [--n 100000] [--L 10]

Both backends execute identical floating-point work, so the table is a pure
implementation-overhead comparison; results are checked to be bitwise equal
while timing.
"""
import argparse
import math
import time

import numpy as np

from sphera import _kernels as K


def _bench(fn, repeats):
    best = math.inf
    out = fn()
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--L", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if "compiled" not in K.backends:
        raise SystemExit("compiled backend not built; nothing to compare")

    rng = np.random.default_rng(0)
    theta = np.arccos(rng.uniform(-1, 1, args.n))
    phi = rng.uniform(0, 2 * math.pi, args.n)
    ct, st, cp, sp = K.trig_from_angles(theta, phi)
    x = rng.uniform(-1, 1, args.n)
    packed = rng.normal(size=K.packed_size(args.L)) + 0j
    v = rng.normal(size=(args.n, 8))

    jobs = {
        f"conj_harmonic_sums (n={args.n}, L={args.L})":
            lambda b: K.conj_harmonic_sums(args.L, ct, st, cp, sp, backend=b),
        f"expansion_values   (n={args.n}, L={args.L})":
            lambda b: K.expansion_values(args.L, packed, ct, st, cp, sp, backend=b),
        f"legendre_sums      (n={args.n}, lmax={2 * args.L})":
            lambda b: K.legendre_sums(2 * args.L, x, backend=b),
        f"crossmoments       (n={args.n}, d=8)":
            lambda b: K.crossmoments(v, backend=b),
    }

    print(f"{'kernel':44s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}  bitwise")
    for label, job in jobs.items():
        tc, outc = _bench(lambda: job("compiled"), args.repeats)
        tp, outp = _bench(lambda: job("python"), args.repeats)
        if isinstance(outc, tuple):
            same = all(np.array_equal(a, b) for a, b in zip(outc, outp))
        else:
            same = np.array_equal(np.asarray(outc).view(np.float64),
                                  np.asarray(outp).view(np.float64))
        print(f"{label:44s} {tc * 1e3:8.2f}ms {tp * 1e3:8.2f}ms {tp / tc:7.1f}x  {same}")


if __name__ == "__main__":
    main()
