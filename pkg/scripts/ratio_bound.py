#!/usr/bin/env python3
"""Optimize depth-1 angles on the 3-regular catalog graphs and tabulate ratios.

The transverse-field ansatz on 3-regular MaxCut carries a 0.6924 worst-case
approximation-ratio floor at depth 1; this experiment checks the floor holds
for every built-in 3-regular instance under the default grid + simplex search.
"""
import argparse
import time

from qaoasim import OptimizerConfig, brute_force, instance_catalog, vqa_loop

THREE_REGULAR = ("k4", "prism3", "k33", "q3", "petersen")
FLOOR = 0.6924


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--grid", type=int, default=64)
    args = parser.parse_args()

    catalog = instance_catalog()
    config = OptimizerConfig(
        method="grid_then_nelder_mead", grid_resolution=args.grid, seed=args.seed
    )
    print(f"{'instance':10s} {'optimum':>8s} {'expectation':>12s} {'ratio':>9s} {'time':>7s}")
    worst = 1.0
    for name in THREE_REGULAR:
        entry = catalog[name]
        start = time.perf_counter()
        oracle = brute_force(entry.problem)
        result = vqa_loop(entry.default_spec, entry.problem, config, oracle_report=oracle)
        elapsed = time.perf_counter() - start
        worst = min(worst, result.approximation_ratio)
        print(
            f"{name:10s} {oracle.optimum:8.1f} {result.best_expectation:12.6f} "
            f"{result.approximation_ratio:9.6f} {elapsed:6.2f}s"
        )
    verdict = "holds" if worst >= FLOOR else "VIOLATED"
    print(f"\nworst ratio {worst:.6f}; {FLOOR} floor {verdict}")


if __name__ == "__main__":
    main()
