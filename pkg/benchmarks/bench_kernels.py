"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each case runs once untimed (numba compilation, caches) and then reports the
best of ``--repeat`` timings per backend.
"""

import argparse
import time

import numpy as np

from ttp import GeneratorConfig, KPClass, SolverConfig, generate_instance, joint_ea, kernels
from ttp.evaluate import evaluate_arrays
from ttp.oracle import all_masks, all_tours, time_matrix


def _best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    big = generate_instance(GeneratorConfig(n_cities=100, items_per_city=3, kp_class=KPClass.UNCORRELATED, seed=1))
    small = generate_instance(GeneratorConfig(n_cities=8, items_per_city=1, kp_class=KPClass.UNCORRELATED, seed=2))
    rng = np.random.default_rng(0)
    pop = 1000
    tours = np.zeros((pop, big.n), dtype=np.int64)
    for k in range(pop):
        tours[k, 1:] = rng.permutation(np.arange(1, big.n))
    plans = kernels.repair(rng.random((pop, big.m)) < 0.3, big.item_weights, big.removal_order, float(big.capacity))
    every_tour, every_mask = all_tours(small.n), np.ascontiguousarray(all_masks(small.m))

    return {
        "evaluate_pairs (1000 x n=100, m=297)": lambda: evaluate_arrays(big, tours, plans),
        "tour_times oracle table (5040 x 128)": lambda: time_matrix(small, every_tour, every_mask),
        "repair (1000 x m=297)": lambda: kernels.repair(plans, big.item_weights, big.removal_order, 1000.0),
        "two_opt (n=100)": lambda: kernels.two_opt(big.dist, tours[0]),
        "joint_ea (n=100, 20k evals)": lambda: joint_ea(big, SolverConfig(seed=0, eval_budget=20_000)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    table = cases()
    print(f"{'case':42s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fn in table.items():
        row = {}
        for backend in ("numba", "numpy"):
            with kernels.use_backend(backend):
                row[backend] = _best_of(fn, args.repeat)
        print(f"{name:42s} {row['numba']*1e3:9.2f}ms {row['numpy']*1e3:9.2f}ms {row['numpy']/row['numba']:7.1f}x")


if __name__ == "__main__":
    main()
