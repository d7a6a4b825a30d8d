"""Exact volume sampling of column subsets.

A subset ``C`` of ``r`` columns is drawn with probability proportional to
``det(X_C^T X_C)``. Columns are picked in increasing index order: each round
finds, by binary search over a table of suffix outer products
``W_l = X_[l:] X_[l:]^T``, the smallest next index with the right marginal,
projects it out of the working matrix, and updates the table by a rank-one
formula.

Masses are handled as logarithms of ``S_q(W_l)`` on the Frobenius-normalized
matrix, which preserves the distribution and keeps products of many small
eigenvalues in range.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePivotError, RankDeficientError
from .linalg import as_matrix, as_subset, numerical_rank, project_out, spectrum, sym_eigen
from .symfunc import elem_sym, log_elem_sym


class SuffixOuterTable:
    """Suffix outer products of a working matrix.

    ``W[l]`` holds ``Y[:, l:] @ Y[:, l:].T`` for ``l`` in ``[0, n]`` (``W[n]``
    is zero). Entries below ``start`` are not maintained once a caller has
    restricted updates to a suffix.
    """

    def __init__(self, W, Y, start=0):
        self.W = W
        self.Y = Y
        self.start = start

    @property
    def n(self):
        return self.Y.shape[1]

    @property
    def m(self):
        return self.Y.shape[0]

    def entry(self, l):
        return self.W[l]

    def copy(self, start=None):
        start = self.start if start is None else start
        W = np.empty_like(self.W)
        W[start:] = self.W[start:]
        return SuffixOuterTable(W, self.Y.copy(), start)

    def validate(self, tol=1e-10):
        """Check telescoping, symmetry, and PSD-ness of the maintained entries."""
        scale = max(float(np.abs(self.W[self.start]).max()), 1e-300)
        for l in range(self.start, self.n):
            y = self.Y[:, l]
            if np.abs(self.W[l] - self.W[l + 1] - np.outer(y, y)).max() > tol * scale:
                raise AssertionError(f"telescoping violated at entry {l}")
            sym_eigen(self.W[l], psd=True, method="lapack")
        if np.abs(self.W[self.n]).max() != 0.0:
            raise AssertionError("last table entry must be zero")

    def rank_one_update(self, l, start=None):
        """Project column ``l`` out of the working matrix, in place.

        Table entries from ``start`` (default: the current start) onward are
        updated with ``P W P`` for ``P = I - z z^T``, ``z = Y_l / ||Y_l||``.
        """
        start = self.start if start is None else max(start, self.start)
        y = self.Y[:, l]
        ny = np.linalg.norm(y)
        if ny == 0.0 or ny <= 1e-14 * max(np.linalg.norm(self.Y), 1e-300):
            raise DegeneratePivotError(f"degenerate pivot: column {l} has zero norm")
        z = y / ny
        Ws = self.W[start : self.n]
        Wz = Ws @ z
        zWz = Wz @ z
        Ws -= z[None, :, None] * Wz[:, None, :]
        Ws -= Wz[:, :, None] * z[None, None, :]
        Ws += zWz[:, None, None] * np.outer(z, z)[None]
        self.Y = project_out(self.Y, l)
        self.start = start
        return self


def build_table(X, check=None):
    """Build the suffix outer-product table of ``X`` in ``O(m^2 n)``."""
    Y = as_matrix(X).copy()
    m, n = Y.shape
    W = np.zeros((n + 1, m, m))
    for l in range(n - 1, -1, -1):
        y = Y[:, l]
        np.add(W[l + 1], np.outer(y, y), out=W[l])
    table = SuffixOuterTable(W, Y)
    if check is None:
        check = n * m * m <= 200_000
    if check:
        table.validate()
    return table


def table_rank_one_update(T, l):
    """Return a new table with column ``l`` projected out of every entry."""
    return T.copy().rank_one_update(l)


@dataclass(frozen=True)
class RoundRecord:
    """One sampling round: draw, mass in play, pick, and leftover threshold."""

    tau: float
    total_mass: float
    chosen: int
    residual: float


@dataclass(frozen=True)
class SampleTrace:
    chosen: tuple
    rounds: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.chosen, self.chosen[1:])):
            raise AssertionError("chosen indices must be strictly increasing")


class _Node:
    __slots__ = ("table", "order", "since_refresh", "logs")

    def __init__(self, table, order, since_refresh):
        self.table = table
        self.order = order
        self.since_refresh = since_refresh
        self.logs = {}


class VolumeSampler:
    """Reusable exact volume sampler for a fixed matrix and subset size.

    The state reached after a given prefix of chosen columns is
    deterministic, so up to ``cache_nodes`` such states (tables plus the
    masses already evaluated on them) are kept between draws. With
    ``cache_nodes=0`` every draw works on a private table updated in place.
    """

    def __init__(self, X, r, cache_nodes=256, eig_method="auto"):
        X = as_matrix(X)
        m, n = X.shape
        if not 1 <= r <= n:
            raise ValueError(f"r={r} out of range [1, {n}]")
        fro = np.linalg.norm(X)
        if fro == 0.0:
            raise RankDeficientError("rank deficient for r: zero matrix")
        self.X = X / fro
        self.r = r
        self.eig_method = eig_method
        self.cache_nodes = cache_nodes
        if numerical_rank(spectrum(self.X)) < r:
            raise RankDeficientError(f"rank deficient for r={r}")
        self.refresh_every = max(1, math.ceil(n / 4))
        self._root_table = None
        self._cache = {}
        self.timings = {"build_table": 0.0, "search": 0.0, "update": 0.0}

    @property
    def n(self):
        return self.X.shape[1]

    def _root(self):
        node = self._cache.get(())
        if node is not None:
            return node
        t0 = time.perf_counter()
        table = build_table(self.X)
        self.timings["build_table"] += time.perf_counter() - t0
        node = _Node(table, self.r, 0)
        if self.cache_nodes > 0:
            self._cache[()] = node
        return node

    def _child(self, node, prefix):
        cached = self._cache.get(prefix)
        if cached is not None:
            return cached
        t0 = time.perf_counter()
        l = prefix[-1]
        keep = self.cache_nodes > 0 and len(self._cache) < self.cache_nodes
        shared = self.cache_nodes > 0 and node is self._cache.get(prefix[:-1])
        table = node.table.copy(start=l) if shared else node.table
        table.rank_one_update(l, start=l + 1)
        since = node.since_refresh + 1
        if since >= self.refresh_every:
            # bound rounding drift from repeated rank-one updates
            fresh = build_table(table.Y, check=False)
            fresh.start = table.start
            table, since = fresh, 0
        child = _Node(table, node.order - 1, since)
        self.timings["update"] += time.perf_counter() - t0
        if keep:
            self._cache[prefix] = child
        return child

    def _log_mass(self, node, l):
        """``log S_q(W_l)`` for the node's order ``q``."""
        val = node.logs.get(l)
        if val is None:
            if l >= self.n:
                val = 0.0 if node.order == 0 else -math.inf
            else:
                sigma = sym_eigen(node.table.entry(l), method=self.eig_method)
                val = log_elem_sym(sigma, node.order)
            node.logs[l] = val
        return val

    def _cell(self, node, l, log_total):
        """Fraction of the round's mass on column ``l``."""
        a = self._log_mass(node, l)
        b = self._log_mass(node, l + 1)
        if a == -math.inf:
            return 0.0
        return math.exp(a - log_total) * -math.expm1(b - a)

    def sample(self, rng):
        """Draw one subset; returns a :class:`SampleTrace`."""
        rng = np.random.default_rng(rng)
        node = self._root()
        prefix = ()
        rounds = []
        n = self.n
        for _ in range(self.r):
            t0 = time.perf_counter()
            p = prefix[-1] + 1 if prefix else 0
            log_total = self._log_mass(node, p)
            if log_total == -math.inf:
                raise AssertionError("internal invariant violated: zero-mass suffix")
            tau = float(rng.random())
            t = tau
            lo, hi = p, n - 1
            while lo != hi:
                mid = (lo + hi) // 2
                a = self._log_mass(node, lo)
                b = self._log_mass(node, mid + 1)
                h = 0.0 if a == -math.inf else math.exp(a - log_total) * -math.expm1(b - a)
                if t > h:
                    t -= h
                    lo = mid + 1
                else:
                    hi = mid
            rounds.append(RoundRecord(tau, math.exp(log_total), lo, t))
            prefix = prefix + (lo,)
            self.timings["search"] += time.perf_counter() - t0
            if len(prefix) < self.r:
                node = self._child(node, prefix)
        return SampleTrace(prefix, tuple(rounds))

    def sample_many(self, rng, size):
        rng = np.random.default_rng(rng)
        return [self.sample(rng).chosen for _ in range(size)]

    def path_probability(self, C):
        """Probability that :meth:`sample` returns ``C``, from the round masses."""
        C = as_subset(C, self.n)
        if len(C) != self.r:
            raise ValueError(f"subset size {len(C)} != r={self.r}")
        node = self._root()
        prob = 1.0
        prefix = ()
        for l in C:
            p = prefix[-1] + 1 if prefix else 0
            log_total = self._log_mass(node, p)
            prob *= self._cell(node, l, log_total)
            if prob == 0.0:
                return 0.0
            prefix = prefix + (l,)
            if len(prefix) < self.r:
                node = self._child(node, prefix)
        return prob


def volume_sample(X, r, rng=0, eig_method="auto", timings=None):
    """Sample ``r`` columns of ``X`` with probability proportional to ``det(X_C^T X_C)``.

    ``rng`` is a seed or a ``numpy.random.Generator``; one uniform in
    ``[0, 1)`` is drawn per round. Phase timings are added into ``timings``
    when a dict is given.
    """
    sampler = VolumeSampler(X, r, cache_nodes=0, eig_method=eig_method)
    trace = sampler.sample(rng)
    if timings is not None:
        for key, val in sampler.timings.items():
            timings[key] = timings.get(key, 0.0) + val
    return trace


def first_column_marginal(X, r, j):
    """Probability that ``j`` is the smallest index of a volume-sampled r-subset."""
    X = as_matrix(X)
    n = X.shape[1]
    if not 0 <= j < n:
        raise ValueError(f"column {j} out of range")
    X = X / np.linalg.norm(X)
    sigma = spectrum(X)
    if numerical_rank(sigma) < r:
        raise RankDeficientError(f"rank deficient for r={r}")
    total = elem_sym(sigma, r)
    nj2 = float(X[:, j] @ X[:, j])
    if nj2 == 0.0:
        return 0.0
    if j == n - 1:
        rest = 1.0 if r == 1 else 0.0
    else:
        Y = project_out(X[:, j:], 0)[:, 1:]
        rest = elem_sym(spectrum(Y), r - 1) if r - 1 <= Y.shape[1] else 0.0
    return nj2 * rest / total
