"""Brute-force ground truth by enumerating every column subset.

Only usable on small instances; the number of subsets is capped (default
one million, overridable with the ``VOLCOL_ORACLE_CAP`` environment
variable or the ``cap`` argument).
"""

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import OracleCapError
from .linalg import as_matrix, gram, residual_trace

DEFAULT_CAP = 10**6
DET_ZERO_RTOL = 1e-14
_CHUNK = 50_000


def oracle_cap(cap=None):
    if cap is not None:
        return int(cap)
    env = os.environ.get("VOLCOL_ORACLE_CAP")
    return int(env) if env else DEFAULT_CAP


def _check_cap(n, r, cap):
    count = math.comb(n, r)
    limit = oracle_cap(cap)
    if count > limit:
        raise OracleCapError(f"instance too large for oracle: C({n},{r})={count} > cap {limit}")
    return count


@dataclass(frozen=True)
class VolumeDistribution:
    """Exact volume-sampling law over the r-subsets of a matrix's columns.

    ``subsets`` lists every r-subset in lexicographic order; subsets whose
    Gram determinant is numerically zero carry weight 0.
    """

    subsets: tuple
    weights: np.ndarray
    probabilities: np.ndarray
    normalizer: float

    @property
    def support(self):
        return [
            (C, float(w), float(p))
            for C, w, p in zip(self.subsets, self.weights, self.probabilities)
            if w > 0.0
        ]

    def probability(self, C):
        return float(self.probabilities[self.subsets.index(tuple(sorted(C)))])

    def as_dict(self):
        return {C: float(p) for C, p in zip(self.subsets, self.probabilities)}


def subset_determinants(X, r, cap=None):
    """All r-subsets in lexicographic order with their ``det(X_C^T X_C)``."""
    X = as_matrix(X)
    n = X.shape[1]
    _check_cap(n, r, cap)
    subsets = tuple(itertools.combinations(range(n), r))
    if r == 0:
        return subsets, np.ones(1)
    G = gram(X)
    diag = np.diag(G)
    idx = np.array(subsets, dtype=np.intp)
    dets = np.empty(len(subsets))
    for start in range(0, len(subsets), _CHUNK):
        block = idx[start : start + _CHUNK]
        minors = G[block[:, :, None], block[:, None, :]]
        sign, logdet = np.linalg.slogdet(minors)
        d = np.where(sign > 0, np.exp(logdet), 0.0)
        # Hadamard's bound gives the natural scale of each minor
        hadamard = np.prod(diag[block], axis=1)
        d[d <= DET_ZERO_RTOL * hadamard] = 0.0
        dets[start : start + _CHUNK] = d
    return subsets, dets


def exact_distribution(X, r, cap=None):
    """Enumerate every r-subset with probability ``det(X_C^T X_C) / Z``."""
    subsets, dets = subset_determinants(X, r, cap)
    Z = float(dets.sum())
    if Z <= 0.0:
        raise ValueError(f"all {r}-subsets are singular")
    return VolumeDistribution(subsets, dets, dets / Z, Z)


def exact_expected_trace(X, r, cap=None):
    """Expected residual trace of a volume-sampled r-subset, by enumeration."""
    dist = exact_distribution(X, r, cap)
    return float(sum(p * residual_trace(X, C) for C, _, p in dist.support))


def best_subset(X, r, cap=None):
    """Subset minimizing the residual trace, ties to the lexicographically first."""
    X = as_matrix(X)
    n = X.shape[1]
    _check_cap(n, r, cap)
    best, best_val = None, math.inf
    for C in itertools.combinations(range(n), r):
        val = residual_trace(X, C)
        if val < best_val:
            best, best_val = C, val
    return best, best_val


def min_index_decomposition(X, r, cap=None):
    """Per first column j: ``P(min C = j)`` and ``E[residual | min C = j]``."""
    dist = exact_distribution(X, r, cap)
    n = as_matrix(X).shape[1]
    mass = np.zeros(n)
    weighted = np.zeros(n)
    for C, _, p in dist.support:
        mass[C[0]] += p
        weighted[C[0]] += p * residual_trace(X, C)
    cond = np.divide(weighted, mass, out=np.zeros(n), where=mass > 0)
    return mass, cond
