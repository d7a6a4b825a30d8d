"""Dense real linear algebra used throughout volcol.

Matrices are plain ``numpy`` float arrays. Column subsets are tuples of
strictly increasing integer indices.
"""

from functools import lru_cache

import numpy as np

from .errors import DependentColumnsError, NotPSDError, NotSymmetricError

SYMMETRY_RTOL = 1e-10
CLAMP_RTOL = 1e-8
# Dimension up to which sym_eigen uses the in-house Jacobi solver by default.
JACOBI_MAX_DIM = 48


def as_matrix(X):
    """Validate ``X`` as a finite, non-empty 2-D float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    return X


def as_subset(C, n):
    """Validate a column subset against ``n`` columns; returns a sorted tuple."""
    idx = tuple(int(i) for i in C)
    if any(i < 0 or i >= n for i in idx):
        raise ValueError(f"column index out of range for n={n}: {idx}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate column indices: {idx}")
    return tuple(sorted(idx))


def gram(X):
    """Return ``X^T X``, symmetrized exactly."""
    X = as_matrix(X)
    G = X.T @ X
    return 0.5 * (G + G.T)


@lru_cache(maxsize=None)
def _round_robin(n):
    """Pairings for a parallel cyclic Jacobi sweep (circle method).

    Each round is a pair of index arrays ``(p, q)`` with ``p < q`` and all
    indices in a round disjoint, so the rotations of a round commute.
    """
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                pairs.append((min(a, b), max(a, b)))
        p = np.array([a for a, _ in pairs], dtype=np.intp)
        q = np.array([b for _, b in pairs], dtype=np.intp)
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(A, vectors=True, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Rotations are scheduled in round-robin order so that each round acts on
    disjoint index pairs and can be applied as one vectorized update.

    Returns ``(values, V)`` with ``A V = V diag(values)``; values are in no
    particular order. ``V`` is ``None`` when ``vectors`` is false.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n) if vectors else None
    if n == 1:
        return A.diagonal().copy(), V
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(A * A) - np.sum(A.diagonal() ** 2), 0.0))
        if off <= tol * scale:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(1.0, theta))
            c = 1.0 / np.hypot(1.0, t)
            s = t * c
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = c * Ap - s * Aq
            A[:, q] = s * Ap + c * Aq
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            if vectors:
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    return A.diagonal().copy(), V


def _check_symmetric(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetricError(f"not symmetric: shape {A.shape} is not square")
    scale = max(np.abs(A).max(), 1e-300)
    if np.abs(A - A.T).max() > SYMMETRY_RTOL * scale:
        raise NotSymmetricError("not symmetric")
    return 0.5 * (A + A.T)


def sym_eigen(A, vectors=False, psd=True, method="auto"):
    """Eigenvalues (descending) of a symmetric matrix, optionally with vectors.

    Parameters
    ----------
    A : array_like
        Symmetric matrix; asymmetry beyond 1e-10 relative raises.
    vectors : bool
        Also return the eigenvectors as columns of a matrix.
    psd : bool
        Treat ``A`` as positive semidefinite: eigenvalues in
        ``[-1e-8 * max, 0)`` are clamped to zero and anything more negative
        raises :class:`NotPSDError`.
    method : {"auto", "jacobi", "lapack"}
        ``auto`` runs the cyclic Jacobi solver for dimension up to
        ``JACOBI_MAX_DIM`` and LAPACK ``syevd`` above that.
    """
    A = _check_symmetric(A)
    n = A.shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(A, vectors=vectors)
    elif method == "lapack":
        if vectors:
            w, V = np.linalg.eigh(A)
        else:
            w, V = np.linalg.eigvalsh(A), None
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    order = np.argsort(w)[::-1]
    w = w[order]
    if psd:
        top = max(w[0], 0.0) if n else 0.0
        if n and w[-1] < -CLAMP_RTOL * max(top, np.abs(A).max()):
            raise NotPSDError(f"not PSD: eigenvalue {w[-1]:.3e}")
        w = np.maximum(w, 0.0)
    if vectors:
        return w, V[:, order]
    return w


def spectrum(X, method="auto"):
    """Eigenvalues of ``X^T X`` (length n, descending).

    The smaller of ``X^T X`` and ``X X^T`` is decomposed and the rest is
    padded with exact zeros.
    """
    X = as_matrix(X)
    m, n = X.shape
    if m >= n:
        return sym_eigen(gram(X), method=method)
    K = X @ X.T
    w = sym_eigen(0.5 * (K + K.T), method=method)
    return np.concatenate([w, np.zeros(n - m)])


def numerical_rank(sigma, rtol=1e-12, scale=None):
    """Number of Gram eigenvalues above ``rtol * scale``.

    ``scale`` defaults to the largest eigenvalue.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma.max() <= 0.0:
        return 0
    if scale is None:
        scale = sigma.max()
    return int(np.count_nonzero(sigma > rtol * scale))


def rank_k_error(X, k):
    """``||X - X_(k)||_F^2``, the sum of the Gram eigenvalues past the k-th."""
    X = as_matrix(X)
    m, n = X.shape
    if not 0 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range [0, {min(m, n)}]")
    sigma = spectrum(X)
    return float(np.sum(sigma[k:]))


def orthonormal_basis(A, drop_tol):
    """Orthonormal basis of span(A) by modified Gram-Schmidt, twice.

    Columns whose residual norm falls to ``drop_tol`` or below are dropped,
    so the basis size is the numerical rank of ``A``.
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    basis = []
    for j in range(A.shape[1]):
        v = A[:, j].copy()
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > drop_tol:
            basis.append(v / nv)
            if len(basis) == m:
                break
    if not basis:
        return np.zeros((m, 0))
    return np.column_stack(basis)


def residual_trace(X, C):
    """``Tr(X^T X_C^perp X)``: squared Frobenius error of projecting X onto span(X_C)."""
    X = as_matrix(X)
    m, n = X.shape
    C = as_subset(C, n)
    fro = np.linalg.norm(X)
    if not C:
        return float(fro**2)
    Q = orthonormal_basis(X[:, C], drop_tol=1e-10 * fro)
    if Q.shape[1] == m:
        return 0.0
    R = X - Q @ (Q.T @ X)
    R -= Q @ (Q.T @ R)
    return float(np.sum(R * R))


def det_pivoted(A):
    """Determinant via LU with partial pivoting."""
    sign, logdet = np.linalg.slogdet(np.asarray(A, dtype=float))
    return float(sign * np.exp(logdet)) if sign != 0 else 0.0


def squared_distance_det(A, x):
    """Squared distance of ``x`` to span(A) as a bordered-Gram determinant ratio."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    x = np.asarray(x, dtype=float).ravel()
    G = A.T @ A
    det_g = det_pivoted(G)
    # Hadamard: det(A^T A) <= prod ||A_i||^2
    scale = float(np.prod(np.diag(G)))
    if scale == 0.0 or det_g <= 1e-12 * scale:
        raise DependentColumnsError("dependent columns")
    Ax = A.T @ x
    r = A.shape[1]
    B = np.empty((r + 1, r + 1))
    B[:r, :r] = G
    B[:r, r] = Ax
    B[r, :r] = Ax
    B[r, r] = x @ x
    return max(det_pivoted(B) / det_g, 0.0)


def project_out(X, j):
    """Replace every column X_i by ``X_i - z (z^T X_i)`` with ``z = X_j / ||X_j||``.

    A zero column ``j`` leaves X unchanged. Column ``j`` is set to exactly zero.
    """
    X = as_matrix(X)
    v = X[:, j]
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return X.copy()
    z = v / nv
    Y = X - np.outer(z, z @ X)
    Y[:, j] = 0.0
    return Y


def psd_sqrt(A):
    """Symmetric square root ``X`` of a PSD matrix, so ``X^T X = A``."""
    w, V = sym_eigen(A, vectors=True, psd=True)
    X = (V * np.sqrt(w)) @ V.T
    return 0.5 * (X + X.T)
