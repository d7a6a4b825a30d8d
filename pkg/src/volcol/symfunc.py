"""Elementary symmetric polynomials, their ratios, and majorization helpers."""

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError
from .linalg import sym_eigen

VECTOR_TOL = 1e-12


def _as_nonneg(sigma):
    sigma = np.asarray(sigma, dtype=float).ravel()
    if np.any(sigma < 0):
        raise ValueError("symmetric polynomial arguments must be non-negative")
    return sigma


def elem_sym_all(sigma, r):
    """Return ``[S_0, ..., S_r]`` of ``sigma`` by the one-pass recurrence."""
    sigma = _as_nonneg(sigma)
    if not 0 <= r <= sigma.size:
        raise ValueError(f"r={r} out of range [0, {sigma.size}]")
    e = np.zeros(r + 1)
    e[0] = 1.0
    for s in sigma:
        # right-hand side holds the values before this element
        e[1:] += s * e[:-1].copy()
    return e


def elem_sym(sigma, r):
    """The r-th elementary symmetric polynomial ``S_r(sigma)``; ``S_0 = 1``."""
    return float(elem_sym_all(sigma, r)[r])


def log_elem_sym(sigma, r):
    """``log S_r(sigma)`` computed on a rescaled copy; ``-inf`` when it vanishes."""
    sigma = _as_nonneg(sigma)
    if r == 0:
        return 0.0
    total = sigma.sum()
    if total == 0.0:
        return -np.inf
    c = total / r
    val = elem_sym(sigma / c, r)
    if val <= 0.0:
        return -np.inf
    return float(np.log(val) + r * np.log(c))


def elem_sym_matrix(A, r, method="auto"):
    """``S_r`` of a symmetric PSD matrix, evaluated on its eigenvalues."""
    return elem_sym(sym_eigen(A, method=method), r)


def sym_ratio(sigma, r):
    """``S_{r+1}(sigma) / S_r(sigma)``.

    Evaluated on ``sigma`` normalized by its sum; the ratio is homogeneous of
    degree one so the scale is restored afterwards.
    """
    sigma = _as_nonneg(sigma)
    if not 0 <= r < sigma.size:
        if r == sigma.size:
            # S_{r+1} of an r-vector is zero
            if np.count_nonzero(sigma) < r:
                raise RankDeficientError("rank too low")
            return 0.0
        raise ValueError(f"r={r} out of range for length {sigma.size}")
    total = sigma.sum()
    if np.count_nonzero(sigma) < r or (r > 0 and total == 0.0):
        raise RankDeficientError("rank too low")
    if total == 0.0:
        return 0.0
    e = elem_sym_all(sigma / total, r + 1)
    if e[r] <= 0.0:
        raise RankDeficientError("rank too low")
    return float(total * e[r + 1] / e[r])


def lemma31_bound(sigma, k, r):
    """Tail mass past the k largest entries divided by ``r + 1 - k``.

    Upper-bounds :func:`sym_ratio` for every non-negative ``sigma``.
    """
    sigma = _as_nonneg(sigma)
    n = sigma.size
    if not 1 <= k <= r <= n - 1:
        raise ValueError(f"need 1 <= k <= r <= n-1, got k={k}, r={r}, n={n}")
    tail = np.sort(sigma)[::-1][k:].sum()
    return float(tail / (r + 1 - k))


def majorizes(a, b, tol=VECTOR_TOL):
    """True when ``a`` majorizes ``b``: sorted prefix sums dominate, totals agree."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    sa, sb = a.sum(), b.sum()
    if abs(sa - sb) > tol * max(abs(sa), abs(sb), 1.0):
        return False
    pa = np.cumsum(np.sort(a)[::-1])
    pb = np.cumsum(np.sort(b)[::-1])
    return bool(np.all(pa >= pb - tol))


@dataclass(frozen=True)
class MajorizationPair:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if not majorizes(self.a, self.b):
            raise ValueError("a does not majorize b")


def reverse_robin_hood(vec, i, j, fraction):
    """Move ``fraction`` of the smaller of entries i, j onto the larger one."""
    out = np.array(vec, dtype=float, copy=True)
    lo, hi = (i, j) if out[i] <= out[j] else (j, i)
    amount = fraction * out[lo]
    out[lo] -= amount
    out[hi] += amount
    return out


def random_majorization_pair(n, rng, transfers=None):
    """Random ``(a, b)`` with ``a`` majorizing ``b``.

    ``b`` is a random non-negative vector summing to one; ``a`` is obtained
    from it by ``transfers`` random reverse Robin Hood moves (default: a
    random count in ``[0, 2n]``).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    b = rng.random(n)
    if rng.random() < 0.3:
        b[rng.random(n) < 0.25] = 0.0
    if b.sum() == 0.0:
        b[0] = 1.0
    b = b / b.sum()
    if transfers is None:
        transfers = int(rng.integers(0, 2 * n + 1))
    a = b.copy()
    for _ in range(transfers):
        i, j = rng.choice(n, size=2, replace=False)
        a = reverse_robin_hood(a, i, j, rng.random())
    return MajorizationPair(a=a, b=b)
