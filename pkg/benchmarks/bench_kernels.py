"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--rows 20000]
"""

import argparse
import timeit

import numpy as np

from rdnsgeo.kernels import load_backend


def workloads(rows, seed):
    rng = np.random.default_rng(seed)
    lats = np.ascontiguousarray(rng.uniform(-60, 60, rows))
    lons = np.ascontiguousarray(rng.uniform(-180, 180, rows))
    weights = np.ones(rows)
    centers = np.arange(min(rows, 300), dtype=np.int64)
    X = np.ascontiguousarray(rng.normal(size=(rows, 37)))
    y = (rng.random(rows) < 0.3).astype(np.float64)
    w0 = np.zeros(37)
    return {
        "haversine_many": lambda k: k.haversine_many(10.0, 20.0, lats, lons),
        "nearest_index": lambda k: k.nearest_index(10.0, 20.0, lats, lons),
        "densest_center": lambda k: k.densest_center(lats[:2000], lons[:2000], weights[:2000],
                                                     20.0, centers),
        "loss_and_grad": lambda k: k.loss_and_grad(X, y, w0, 0.0, 1e-4),
        "gradient_descent_20": lambda k: k.gradient_descent(X, y, w0, 0.0, 0.5, 1e-4, 20),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {"python": load_backend("python")}
    try:
        backends["cython"] = load_backend("cython")
    except ImportError:
        print("compiled kernels not built; timing the numpy fallback only")

    print(f"{'kernel':<22}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workloads(args.rows, args.seed).items():
        times = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) * 1000
                 for b, k in backends.items()}
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<22}" + "".join(f"{t:>12.2f}" for t in times.values()) + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
