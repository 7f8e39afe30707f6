"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--n 5000] [--repeat 5]

Prints one line per kernel with the best-of-``repeat`` time for each backend,
the speedup, and the largest absolute difference between the two outputs.
"""

import argparse
import timeit

import numpy as np

from snbs import kernels


def _inputs(n, rng):
    x = rng.standard_normal(n)
    return x, kernels.prefix_scans(x, float(x.mean()))


def cases(n, rng):
    x, scans = _inputs(n, rng)
    b = max(2, int(np.sqrt(n)))
    z = rng.standard_normal(n)
    u = rng.uniform(0.001, 0.999, size=min(n, 2000))
    return {
        "prefix_scans": lambda m: m.prefix_scans(x, 0.25),
        "sliding_normalizers": lambda m: m.sliding_normalizers(*scans, b),
        "tar_recursion": lambda m: m.tar_recursion(z, 0.5, 0.0),
        "t_quantile_array": lambda m: m.t_quantile_array(u, 1.5),
        "t_from_normal": lambda m: m.t_from_normal(z[:2000], 1.5),
    }


def _maxdiff(a, b):
    if isinstance(a, tuple):
        return max(_maxdiff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    found = kernels.backends()
    if "cython" not in found:
        print("compiled backend not built; only the Python fallback is available")
    rng = np.random.default_rng(20240101)
    print(f"n={args.n}  backends={', '.join(found)}")
    print(f"{'kernel':<22}{'python [ms]':>13}{'cython [ms]':>13}{'speedup':>10}{'max |diff|':>13}")
    for name, fn in cases(args.n, rng).items():
        times = {}
        for label, mod in found.items():
            times[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        py = times["python"] * 1e3
        if "cython" in times:
            cy = times["cython"] * 1e3
            diff = _maxdiff(fn(found["python"]), fn(found["cython"]))
            print(f"{name:<22}{py:>13.3f}{cy:>13.3f}{py / cy:>10.1f}{diff:>13.2e}")
        else:
            print(f"{name:<22}{py:>13.3f}{'-':>13}{'-':>10}{'-':>13}")


if __name__ == "__main__":
    main()
