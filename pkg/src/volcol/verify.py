"""Named consistency checks run by ``volcol verify``."""

from collections import Counter
from dataclasses import asdict, dataclass

import jsonschema
import numpy as np

from .greedy import bound_report, greedy_select
from .linalg import as_matrix, numerical_rank, rank_k_error, residual_trace, spectrum
from .oracle import best_subset, exact_distribution, exact_expected_trace
from .report import validate_report
from .sampler import VolumeSampler
from .symfunc import sym_ratio

IDENTITY_RTOL = 1e-9
PATH_RTOL = 1e-8
BOUND_RTOL = 1e-8


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        self.passed = bool(self.passed)

    def as_dict(self):
        return asdict(self)


def _close(a, b, rtol, fro2):
    # relative, with a floor at roundoff of the problem scale for exact zeros
    return abs(a - b) <= rtol * max(abs(a), abs(b)) + 1e-14 * fro2


def verify_instance(X, r_max, k_max, trials=0, seed=0, cap=None):
    """Expectation identity, sampler exactness and bound checks on one matrix."""
    X = as_matrix(X)
    n = X.shape[1]
    fro2 = float(np.sum(X * X))
    sigma = spectrum(X)
    rank = numerical_rank(sigma)
    checks = []
    for r in range(1, min(r_max, n) + 1):
        if r > rank:
            continue
        formula = (r + 1) * sym_ratio(sigma, r)
        expected = exact_expected_trace(X, r, cap)
        checks.append(
            Check(
                f"expectation_identity[r={r}]",
                _close(expected, formula, IDENTITY_RTOL, fro2),
                f"oracle={expected!r} formula={formula!r}",
            )
        )

        dist = exact_distribution(X, r, cap)
        sampler = VolumeSampler(X, r)
        worst = 0.0
        for C, p in zip(dist.subsets, dist.probabilities):
            q = sampler.path_probability(C)
            worst = max(worst, abs(q - p) / p if p > 0 else abs(q))
        checks.append(Check(f"sampler_exactness[r={r}]", worst <= PATH_RTOL, f"max_rel_err={worst:.3e}"))

        if trials > 0:
            rng = np.random.default_rng(seed)
            counts = Counter(sampler.sample_many(rng, trials))
            emp = np.array([counts.get(C, 0) for C in dist.subsets]) / trials
            tv = 0.5 * float(np.abs(emp - dist.probabilities).sum())
            limit = float(np.sqrt(len(dist.support) / trials))
            checks.append(Check(f"empirical_tv[r={r}]", tv <= limit, f"tv={tv:.4f} limit={limit:.4f}"))

        _, best = best_subset(X, r, cap)
        greedy = greedy_select(X, r).residual_trace
        for k in range(1, min(k_max, r, X.shape[0]) + 1):
            tail = rank_k_error(X, k)
            bound = (r + 1) / (r + 1 - k) * tail
            slack = BOUND_RTOL * max(bound, fro2 * 1e-6)
            checks.append(
                Check(
                    f"bound_sandwich[k={k},r={r}]",
                    best <= expected + slack and expected <= bound + slack,
                    f"best={best!r} expected={expected!r} bound={bound!r}",
                )
            )
            checks.append(
                Check(f"greedy_bound[k={k},r={r}]", greedy <= bound + slack, f"greedy={greedy!r} bound={bound!r}")
            )
    return checks


def verify_report(X, report):
    """Recompute every quantity in a selection report against the matrix."""
    X = as_matrix(X)
    checks = []
    try:
        validate_report(report)
    except jsonschema.ValidationError as exc:
        return [Check("report_schema", False, str(exc).splitlines()[0])]
    checks.append(Check("report_schema", True, "ok"))
    C, k = tuple(report["chosen"]), report["k"]
    if len(C) != report["r"]:
        checks.append(Check("report_size", False, f"|chosen|={len(C)} r={report['r']}"))
        return checks
    try:
        fresh = bound_report(X, C, k, method=report["method"])
    except ValueError as exc:
        checks.append(Check("report_indices", False, str(exc)))
        return checks
    fro2 = float(np.sum(X * X))
    checks.append(
        Check(
            "report_residual",
            _close(report["residual_trace"], residual_trace(X, C), 1e-9, fro2),
            f"reported={report['residual_trace']!r} actual={fresh.residual_trace!r}",
        )
    )
    checks.append(
        Check(
            "report_rank_k_error",
            _close(report["rank_k_error"], fresh.rank_k_error, 1e-9, fro2),
            f"reported={report['rank_k_error']!r} actual={fresh.rank_k_error!r}",
        )
    )
    ratio = report["achieved_ratio"]
    actual = fresh.achieved_ratio
    if ratio is None or not np.isfinite(actual):
        ratio_ok = ratio is None and not np.isfinite(actual)
    else:
        ratio_ok = abs(ratio - actual) <= 1e-9 * max(1.0, actual)
    checks.append(Check("report_ratio", ratio_ok, f"reported={ratio!r} actual={actual!r}"))
    checks.append(
        Check("report_bound", abs(report["bound"] - fresh.bound) <= 1e-12, f"reported={report['bound']!r} actual={fresh.bound!r}")
    )
    checks.append(
        Check(
            "report_flag",
            report["bound_satisfied"] == fresh.bound_satisfied,
            f"reported={report['bound_satisfied']} actual={fresh.bound_satisfied}",
        )
    )
    if report["method"] == "greedy":
        checks.append(Check("report_greedy_bound", fresh.bound_satisfied, "greedy output must satisfy the bound"))
    return checks
