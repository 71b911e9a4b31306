"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is called once
before timing so JIT compilation is excluded; the table reports the best of
``--repeat`` runs and checks that both paths agree.
"""
import argparse
import timeit

import numpy as np

from caustics import kernels
from caustics._jit import jit_enabled
from caustics.obstruction import _factors, random_admissible, residues


def cases(K):
    rng = np.random.default_rng(0)
    c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
    c = 0.5 * (c + np.conj(c[::-1]))
    x = np.linspace(0, 2 * np.pi, 4 * K + 1)
    jets = [1 + 0.05 * rng.normal(size=4096) for _ in range(6)] + [rng.uniform(0.5, 5.5, 4096)]
    p1 = random_admissible(1, K, rng)
    rs = residues(1)
    fac = [_factors(1, r) for r in rs]
    cr, ar, br = (np.array([f[i] for f in fac]) for i in range(3))
    ns = list(range(-K // 3, K // 3 + 1))
    return {
        "convolve": (kernels.convolve, (c, c)),
        "autocorrelation": (kernels.autocorrelation, (c, 3)),
        "synthesize": (kernels.synthesize, (c, x, 2)),
        "chord_partials": (kernels.chord_partials, tuple(jets)),
        "obstruction_sums": (kernels.obstruction_sums, (p1.coeffs, 3, ns, rs, cr, ar, br)),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--K", type=int, default=256, help="series truncation order")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=20)
    args = parser.parse_args(argv)
    if not jit_enabled():
        print("numba unavailable or CAUSTICS_DISABLE_JIT set; timing numpy only")
    print(f"K = {args.K}")
    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  agree")
    for name, (fn, fargs) in cases(args.K).items():
        out = {}
        times = {}
        for flag in (True, False):
            out[flag] = fn(*fargs, use_jit=flag)
            t = timeit.repeat(lambda: fn(*fargs, use_jit=flag), repeat=args.repeat, number=args.number)
            times[flag] = 1e3 * min(t) / args.number
        a, b = out[True], out[False]
        agree = all(np.allclose(x, y, atol=1e-10) for x, y in zip(a, b)) if isinstance(a, tuple) \
            else np.allclose(a, b, atol=1e-10)
        print(f"{name:<18}{times[True]:>12.3f}{times[False]:>12.3f}{times[False] / times[True]:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
