"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 5] [--samples 2000]

Reports per-call time for the eigensolver and for one full Monte Carlo
sample (Haar draw, scaling, eigenvalues), plus the largest difference
between the two backends on the same inputs.
"""

from __future__ import annotations

import argparse
import itertools
import timeit

import numpy as np

from svdensity import _backend
from svdensity.rng import RngStream


def _time(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--samples", type=int, default=2000)
    args = ap.parse_args()
    n = args.n
    sqrt_g = np.arange(1, n + 1, dtype=float)
    inputs = [RngStream(1, k).uniforms(4 * n * n) for k in range(args.samples)]
    a = np.random.default_rng(0).standard_normal((n, n)) + 1j * np.random.default_rng(1).standard_normal((n, n))

    print(f"N={n}, {args.samples} samples; backends: {', '.join(_backend.available())}")
    results = {}
    for name in _backend.available():
        fns = _backend.get(name)
        reps = args.samples if name == "compiled" else max(args.samples // 20, 10)
        t_eig = _time(lambda: fns["eigvals"](a), reps)
        it = itertools.cycle(inputs)
        t_sample = _time(lambda: fns["sample_moduli"](next(it), sqrt_g), min(reps, args.samples))
        results[name] = np.array([np.sort(fns["sample_moduli"](u, sqrt_g)[0]) for u in inputs[:200]])
        print(f"{name:>9}: eigvals {t_eig * 1e6:9.1f} us   sample {t_sample * 1e6:9.1f} us")
        results[name + "_t"] = t_sample
    t_rng = _time(lambda: RngStream(1, 7).uniforms(4 * n * n), args.samples)
    t_lapack = _time(lambda: np.linalg.eigvals(a), args.samples)
    print(f"{'numpy':>9}: eigvals {t_lapack * 1e6:9.1f} us   (LAPACK zgeev, reference)")
    print(f"{'rng':>9}: stream setup + {4 * n * n} uniforms {t_rng * 1e6:.1f} us")
    if "compiled" in results:
        diff = np.max(np.abs(results["compiled"] - results["python"]))
        print(f"speedup (sample): {results['python_t'] / results['compiled_t']:.1f}x; "
              f"max |moduli difference| over 200 samples: {diff:.2e}")


if __name__ == "__main__":
    main()
