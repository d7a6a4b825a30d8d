"""Wall-clock timing of the volume sampler and empirical scaling exponents."""

import statistics
import time

import numpy as np

from .sampler import volume_sample


def random_matrix(m, n, seed):
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(m, n))


def time_volume_sample(m, n, r, repetitions=3, seed=0):
    """Median wall time of ``volume_sample`` on a random m x n matrix, with phase split."""
    X = random_matrix(m, n, seed)
    totals = []
    phases = {"build_table": [], "search": [], "update": []}
    for rep in range(repetitions):
        timings = {}
        t0 = time.perf_counter()
        volume_sample(X, r, rng=seed + rep, timings=timings)
        totals.append(time.perf_counter() - t0)
        for key in phases:
            phases[key].append(timings.get(key, 0.0))
    return {
        "m": m,
        "n": n,
        "r": r,
        "total": statistics.median(totals),
        "build_table": statistics.median(phases["build_table"]),
        "search_per_round": statistics.median(phases["search"]) / r,
        "update_per_round": statistics.median(phases["update"]) / r,
    }


def scaling_exponent(sizes, times):
    """Least-squares slope of log(time) against log(size)."""
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    return float(slope)


def run_bench(m, n, r, repetitions=3, seed=0, doublings=1):
    """Base timing plus doubling sweeps in n and in r."""
    base = time_volume_sample(m, n, r, repetitions, seed)
    n_rows = [base] + [
        time_volume_sample(m, n * 2**i, r, repetitions, seed) for i in range(1, doublings + 1)
    ]
    result = {"base": base, "n_sweep": n_rows, "n_exponent": None, "r_sweep": None, "r_exponent": None}
    if doublings:
        result["n_exponent"] = scaling_exponent([row["n"] for row in n_rows], [row["total"] for row in n_rows])
        r_values = [r * 2**i for i in range(doublings + 1) if r * 2**i <= min(m, n)]
        if len(r_values) > 1:
            r_rows = [base] + [time_volume_sample(m, n, rr, repetitions, seed) for rr in r_values[1:]]
            result["r_sweep"] = r_rows
            result["r_exponent"] = scaling_exponent(r_values, [row["total"] for row in r_rows])
    return result
