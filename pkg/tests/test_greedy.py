import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from volcol.errors import InfeasibleCompletionError, RankDeficientError
from volcol.greedy import bound_report, conditional_expectation, greedy_path, greedy_select
from volcol.hardness import HardInstanceSpec, make_block_instance
from volcol.linalg import rank_k_error, residual_trace
from volcol.oracle import best_subset, exact_expected_trace


def brute_conditional(X, T, r):
    """Weighted average of residuals over r-subsets containing T, weights det(X_C^T X_C)."""
    n = X.shape[1]
    num = den = 0.0
    for C in itertools.combinations(range(n), r):
        if not set(T) <= set(C):
            continue
        w = np.linalg.det(X[:, C].T @ X[:, C])
        num += w * residual_trace(X, C)
        den += w
    return num / den


def random_instance(seed):
    g = np.random.default_rng(seed)
    m, n = (int(v) for v in g.integers(2, 13, size=2))
    return g.uniform(-1, 1, (m, n))


# conditional_expectation


@pytest.mark.parametrize("n, r", [(5, 2), (4, 1), (6, 3)])
def test_conditional_expectation_identity_empty(n, r):
    assert conditional_expectation(np.eye(n), (), r) == pytest.approx(n - r)


def test_conditional_expectation_identity_partial():
    assert conditional_expectation(np.eye(5), (0,), 2) == pytest.approx(3.0)


def test_conditional_expectation_full_set_is_residual(rng):
    X = rng.standard_normal((4, 6))
    assert conditional_expectation(X, (1, 4), 2) == pytest.approx(residual_trace(X, (1, 4)), rel=1e-12)


def test_conditional_expectation_matches_brute_force(rng):
    X = rng.uniform(-1, 1, (5, 7))
    for j in range(7):
        assert conditional_expectation(X, (j,), 3) == pytest.approx(brute_conditional(X, (j,), 3), rel=1e-9)
    assert conditional_expectation(X, (0, 5), 3) == pytest.approx(brute_conditional(X, (0, 5), 3), rel=1e-9)


def test_conditional_expectation_empty_is_oracle(rng):
    X = rng.uniform(-1, 1, (4, 6))
    assert conditional_expectation(X, (), 2) == pytest.approx(exact_expected_trace(X, 2), rel=1e-9)


def test_conditional_expectation_infeasible(rng):
    X = rng.standard_normal((3, 6))
    with pytest.raises(InfeasibleCompletionError, match="infeasible completion"):
        conditional_expectation(X, (0,), 4)
    X[:, 1] = 2 * X[:, 0]
    with pytest.raises(InfeasibleCompletionError):
        conditional_expectation(X, (0, 1), 3)


def test_conditional_expectation_rejects_oversized_T(rng):
    with pytest.raises(ValueError):
        conditional_expectation(rng.standard_normal((3, 5)), (0, 1, 2), 2)


# greedy_path / greedy_select


def test_greedy_identity():
    rep = greedy_select(np.eye(5), 2, k=1)
    assert rep.chosen == (0, 1)
    assert rep.residual_trace == pytest.approx(3.0)
    assert rep.achieved_ratio == pytest.approx(0.75)
    assert rep.bound == pytest.approx(1.5)
    assert rep.bound_satisfied


def test_greedy_prefers_dominant_column():
    X = np.diag([1.0, 10.0, 2.0])
    assert greedy_select(X, 1).chosen == (1,)


@pytest.mark.parametrize("seed", range(20))
def test_descent_invariant(seed):
    X = random_instance(seed)
    r = min(4, *X.shape)
    states = greedy_path(X, r)
    values = [s.expectation for s in states]
    for before, after in zip(values, values[1:]):
        assert after <= before + 1e-9 * max(1.0, before)
    assert values[-1] == pytest.approx(residual_trace(X, states[-1].chosen), rel=1e-9, abs=1e-12)
    assert len(states) == r + 1


@pytest.mark.parametrize("seed", range(100))
def test_greedy_bound(seed):
    X = random_instance(seed)
    rmax = min(5, *X.shape)
    for r in range(1, rmax + 1):
        res = greedy_select(X, r).residual_trace
        for k in range(1, r + 1):
            bound = (r + 1) / (r + 1 - k) * rank_k_error(X, k)
            assert res <= bound * (1 + 1e-8) + 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_fast_and_slow_agree(seed):
    X = random_instance(100 + seed)
    r = min(3, *X.shape)
    assert greedy_select(X, r, fast=True).chosen == greedy_select(X, r, fast=False).chosen


@pytest.mark.parametrize("seed", range(10))
def test_oracle_dominance(seed):
    g = np.random.default_rng(200 + seed)
    X = g.uniform(-1, 1, (4, 7))
    for r in (1, 2, 3):
        _, best = best_subset(X, r)
        greedy = greedy_select(X, r).residual_trace
        expected = exact_expected_trace(X, r)
        assert best <= greedy + 1e-12
        assert greedy <= expected * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), beta=st.floats(1e-3, 1e3))
def test_scale_invariance(seed, beta):
    X = random_instance(seed)
    r = min(3, *X.shape)
    a, b = greedy_select(X, r), greedy_select(beta * X, r)
    assert a.chosen == b.chosen
    assert b.achieved_ratio == pytest.approx(a.achieved_ratio, rel=1e-9)


def test_greedy_rank_deficient(rng):
    with pytest.raises(RankDeficientError):
        greedy_select(rng.standard_normal((2, 6)), 3)


def test_greedy_skips_zero_and_duplicate_columns(rng):
    X = rng.standard_normal((4, 6))
    X[:, 0] = 0.0
    X[:, 2] = X[:, 1]
    C = greedy_select(X, 3).chosen
    assert 0 not in C
    assert not {1, 2} <= set(C)


def test_greedy_timed(rng):
    X = rng.standard_normal((3, 5))
    assert greedy_select(X, 2).wall_time is None
    assert greedy_select(X, 2, timed=True).wall_time >= 0.0


# bound_report


def test_bound_report_hard_block():
    n, r, delta = 5, 2, 0.5
    X = make_block_instance(HardInstanceSpec(k=1, n0=n, delta=delta))
    expected = (n - r) / (n - 1) * (1 + 1 / (r + delta))
    for C in itertools.combinations(range(n), r):
        rep = bound_report(X, C, 1)
        assert rep.achieved_ratio == pytest.approx(expected, rel=1e-8)
        assert rep.bound_satisfied


def test_bound_report_infinite_ratio():
    X = np.zeros((3, 4))
    X[0, 0] = X[1, 1] = 1.0
    rep = bound_report(X, (2, 3), 2)
    assert rep.rank_k_error == 0.0
    assert math.isinf(rep.achieved_ratio)
    assert not rep.bound_satisfied
    assert rep.to_dict()["achieved_ratio"] is None


def test_bound_report_exact_fit():
    X = np.zeros((3, 4))
    X[0, 0] = X[1, 1] = 1.0
    rep = bound_report(X, (0, 1), 2)
    assert rep.achieved_ratio == 1.0
    assert rep.bound_satisfied


def test_bound_report_fields(rng):
    X = rng.standard_normal((4, 6))
    rep = bound_report(X, (3, 1), 1, method="volume", seed=7)
    assert rep.chosen == (1, 3)
    assert (rep.method, rep.seed, rep.r, rep.k) == ("volume", 7, 2, 1)
    assert_allclose(rep.residual_trace, residual_trace(X, (1, 3)))
    assert rep.bound == pytest.approx(1.5)


def test_bound_report_rejects_large_k(rng):
    with pytest.raises(ValueError):
        bound_report(rng.standard_normal((4, 6)), (0,), 2)
