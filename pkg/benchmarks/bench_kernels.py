"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from kmstab import _accel


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    rng = np.random.default_rng(0)
    X = rng.standard_normal((args.n, args.d))
    C = rng.standard_normal((args.k, args.d))
    labels = _accel.assign_numpy(X, C)[0]
    g = np.linspace(-3, 10, args.grid)
    centers = np.array(np.meshgrid(g, g, indexing="ij")).reshape(2, -1).T
    centers = np.ascontiguousarray(centers[centers[:, 0] < centers[:, 1]])
    w, mu = np.array([0.3, 0.7]), np.array([0.0, 7.0])

    cases = {
        "assign": (lambda: _accel.assign_numpy(X, C), lambda: _accel.assign_numba(X, C)),
        "update": (lambda: _accel.update_numpy(X, labels, C), lambda: _accel.update_numba(X, labels, C)),
        "confusion": (
            lambda: _accel.confusion_numpy(labels, labels[::-1].copy(), args.k),
            lambda: _accel.confusion_numba(labels, labels[::-1].copy(), args.k),
        ),
        "population_update": (
            lambda: _accel.population_update_numpy(w, mu, 1.0, centers),
            lambda: _accel.population_update_numba(w, mu, 1.0, centers),
        ),
    }
    print(f"numba available: {_accel.HAVE_NUMBA}; default backend: {_accel.BACKEND}")
    print(f"{'kernel':<20}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (f_np, f_nb) in cases.items():
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        print(f"{name:<20}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
