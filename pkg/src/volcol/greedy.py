"""Deterministic column selection by the method of conditional expectations.

Under volume sampling of r columns, the expected residual given that a set
``T`` of ``t`` columns is included equals the unconditional expectation for
the projected matrix ``Y = X_T^perp X`` with ``r - t`` columns:
``(q + 1) S_{q+1}(sigma') / S_q(sigma')`` with ``q = r - t``. The greedy adds,
one column at a time, the column minimizing that quantity. The minimum never
exceeds the current value, so the final residual is at most the unconditional
expectation.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleCompletionError, RankDeficientError
from .linalg import (
    as_matrix,
    as_subset,
    numerical_rank,
    orthonormal_basis,
    project_out,
    rank_k_error,
    residual_trace,
    spectrum,
    sym_eigen,
)
from .report import SelectionReport
from .symfunc import sym_ratio

SKIP_RTOL = 1e-10
RANK_RTOL = 1e-12
TIE_RTOL = 1e-10
BOUND_SLACK = 1e-8


@dataclass(frozen=True)
class GreedyState:
    chosen: tuple
    Y: np.ndarray
    budget: int
    expectation: float


def _expectation_from_spectrum(sigma, q, fro2):
    if numerical_rank(sigma, RANK_RTOL, scale=fro2) < q:
        raise InfeasibleCompletionError(f"infeasible completion: projected rank below {q}")
    return (q + 1) * sym_ratio(sigma, q)


def conditional_expectation(X, T, r):
    """Expected residual trace of a volume-sampled r-subset that contains ``T``."""
    X = as_matrix(X)
    m, n = X.shape
    T = as_subset(T, n)
    t = len(T)
    if t > r:
        raise ValueError(f"|T|={t} exceeds r={r}")
    if t == r:
        return residual_trace(X, T)
    fro = np.linalg.norm(X)
    if T:
        Q = orthonormal_basis(X[:, T], drop_tol=SKIP_RTOL * fro)
        if Q.shape[1] < t:
            raise InfeasibleCompletionError("infeasible completion: dependent columns in T")
        Y = X - Q @ (Q.T @ X)
        Y -= Q @ (Q.T @ Y)
    else:
        Y = X
    return _expectation_from_spectrum(spectrum(Y), r - t, fro**2)


def _candidate_values_fast(Y, candidates, q, fro2):
    """Conditional expectations after adding each candidate, via rank-one updates.

    Works on the smaller of ``Y Y^T`` and ``Y^T Y``. Infeasible candidates
    get ``inf``.
    """
    m, n = Y.shape
    values = {}
    if m <= n:
        K = Y @ Y.T
        K = 0.5 * (K + K.T)
        for j in candidates:
            z = Y[:, j] / np.linalg.norm(Y[:, j])
            Kz = K @ z
            Kj = K - np.outer(z, Kz) - np.outer(Kz, z) + (z @ Kz) * np.outer(z, z)
            sigma = sym_eigen(0.5 * (Kj + Kj.T))
            sigma = np.concatenate([sigma, np.zeros(n - m)])
            values[j] = _safe_value(sigma, q, fro2)
    else:
        G = Y.T @ Y
        G = 0.5 * (G + G.T)
        for j in candidates:
            g = G[:, j]
            Gj = G - np.outer(g, g) / g[j]
            Gj[j, :] = 0.0
            Gj[:, j] = 0.0
            values[j] = _safe_value(sym_eigen(0.5 * (Gj + Gj.T)), q, fro2)
    return values


def _safe_value(sigma, q, fro2):
    try:
        return _expectation_from_spectrum(sigma, q, fro2)
    except (InfeasibleCompletionError, RankDeficientError):
        return np.inf


def _candidate_values_slow(X, chosen, candidates, r):
    values = {}
    for j in candidates:
        try:
            values[j] = conditional_expectation(X, chosen + (j,), r)
        except (InfeasibleCompletionError, RankDeficientError):
            values[j] = np.inf
    return values


def greedy_path(X, r, fast=True):
    """Run the greedy and return the list of states, initial state first.

    ``fast=False`` recomputes every candidate's conditional expectation from
    scratch; both settings select the same columns.
    """
    X = as_matrix(X)
    m, n = X.shape
    if not 1 <= r <= n:
        raise ValueError(f"r={r} out of range [1, {n}]")
    fro = np.linalg.norm(X)
    fro2 = fro**2
    if numerical_rank(spectrum(X), RANK_RTOL, scale=fro2 if fro2 > 0 else None) < r:
        raise RankDeficientError(f"rank deficient: rank(X) < r={r}")
    Y = X.copy()
    chosen = ()
    states = [GreedyState(chosen, Y, r, conditional_expectation(X, chosen, r))]
    for step in range(r):
        norms = np.linalg.norm(Y, axis=0)
        candidates = [j for j in range(n) if j not in chosen and norms[j] > SKIP_RTOL * fro]
        q = r - step - 1
        if fast and q == 0:
            # last pick: the conditional expectation is the residual itself
            values = {j: float(np.sum(project_out(Y, j) ** 2)) for j in candidates}
        elif fast:
            values = _candidate_values_fast(Y, candidates, q, fro2)
        else:
            values = _candidate_values_slow(X, chosen, candidates, r)
        finite = {j: v for j, v in values.items() if np.isfinite(v)}
        if not finite:
            raise InfeasibleCompletionError("infeasible completion: no admissible column")
        best = min(finite.values())
        tol = TIE_RTOL * abs(best) + 1e-13 * fro2
        pick = min(j for j, v in finite.items() if v <= best + tol)
        chosen = tuple(sorted(chosen + (pick,)))
        Y = project_out(Y, pick)
        expectation = residual_trace(X, chosen) if q == 0 else finite[pick]
        states.append(GreedyState(chosen, Y, q, expectation))
    return states


def bound_report(X, C, k, method="given", seed=None, wall_time=None):
    """Measure the residual of ``C`` against the best rank-k error."""
    X = as_matrix(X)
    C = as_subset(C, X.shape[1])
    r = len(C)
    if not 0 <= k <= r:
        raise ValueError(f"need 0 <= k <= |C|, got k={k}, |C|={r}")
    residual = residual_trace(X, C)
    tail = rank_k_error(X, k)
    fro2 = float(np.sum(X * X))
    # exact zeros are rare in floating point; treat roundoff-level values as zero
    zero = 1e-13 * fro2
    bound = (r + 1) / (r + 1 - k)
    if tail <= zero:
        achieved = 1.0 if residual <= zero else np.inf
    else:
        achieved = residual / tail
    satisfied = bool(np.isfinite(achieved) and achieved <= bound * (1 + BOUND_SLACK))
    return SelectionReport(
        method=method,
        r=r,
        k=k,
        chosen=C,
        residual_trace=residual,
        rank_k_error=tail,
        achieved_ratio=float(achieved),
        bound=bound,
        bound_satisfied=satisfied,
        seed=seed,
        wall_time=wall_time,
    )


def greedy_select(X, r, k=None, fast=True, timed=False):
    """Pick r columns deterministically; report against the rank-k error (default k = r)."""
    t0 = time.perf_counter()
    states = greedy_path(X, r, fast=fast)
    elapsed = time.perf_counter() - t0 if timed else None
    return bound_report(X, states[-1].chosen, r if k is None else k, method="greedy", wall_time=elapsed)
