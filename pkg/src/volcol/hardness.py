"""Instances on which the (r+1)/(r+1-k) guarantee is nearly tight.

The Gram matrix is block diagonal with ``k`` copies of ``delta * I + J``
(``J`` all ones). Every column looks the same within a block, so no subset
can do much better than the average, and for small ``delta`` the best
ratio approaches ``1 + k/r``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import psd_sqrt

DEFAULT_DELTA = 1e-3


@dataclass(frozen=True)
class HardInstanceSpec:
    k: int
    n0: int
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"need k >= 1, got {self.k}")
        if self.n0 < 2:
            raise ValueError(f"need n0 >= 2, got {self.n0}")
        if not self.delta > 0:
            raise ValueError(f"need delta > 0, got {self.delta}")

    @property
    def n(self):
        return self.k * self.n0


def make_M(m, delta):
    """``delta * I + J`` of size m."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if not delta > 0:
        raise ValueError(f"need delta > 0, got {delta}")
    return delta * np.eye(m) + np.ones((m, m))


def block_gram(spec):
    """Block-diagonal Gram with ``spec.k`` copies of ``make_M(spec.n0, spec.delta)``."""
    G = np.zeros((spec.n, spec.n))
    M = make_M(spec.n0, spec.delta)
    for b in range(spec.k):
        s = slice(b * spec.n0, (b + 1) * spec.n0)
        G[s, s] = M
    return G


def make_block_instance(spec):
    """Square matrix X (n x n) with ``X^T X`` equal to :func:`block_gram`.

    Each block is realized by the symmetric square root of ``delta*I + J``,
    so X is block diagonal as well.
    """
    root = psd_sqrt(make_M(spec.n0, spec.delta))
    X = np.zeros((spec.n, spec.n))
    for b in range(spec.k):
        s = slice(b * spec.n0, (b + 1) * spec.n0)
        X[s, s] = root
    return X


def predicted_single_block_residual(n, r, delta):
    """Residual trace shared by every r-subset when the Gram is ``delta*I + J``."""
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    if not delta > 0:
        raise ValueError(f"need delta > 0, got {delta}")
    return (n - r) * delta * (1 + 1 / (r + delta))


def predicted_block_ratio(spec, r):
    """Lower bound on residual / rank-k error over all r-subsets of the block instance.

    Attained when every block contributes ``r / k`` columns.
    """
    n, k = spec.n, spec.k
    if not k <= r <= n - 1:
        raise ValueError(f"need k <= r <= n-1, got k={k}, r={r}, n={n}")
    return (n - r) / (n - k) * (1 + 1 / (spec.delta + r / k))


def balanced_subset(spec, r):
    """``r`` columns spread over the blocks as evenly as possible, lowest indices first."""
    if not 0 <= r <= spec.n:
        raise ValueError(f"r={r} out of range")
    base, extra = divmod(r, spec.k)
    cols = []
    for b in range(spec.k):
        take = base + (1 if b < extra else 0)
        cols.extend(b * spec.n0 + i for i in range(take))
    return tuple(cols)
