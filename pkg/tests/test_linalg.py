import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from volcol.errors import DependentColumnsError, NotPSDError, NotSymmetricError
from volcol.hardness import make_M
from volcol.linalg import (
    as_subset,
    gram,
    jacobi_eigh,
    numerical_rank,
    project_out,
    psd_sqrt,
    rank_k_error,
    residual_trace,
    spectrum,
    squared_distance_det,
    sym_eigen,
)


def naive_gram(X):
    m, n = X.shape
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for t in range(m):
                G[i, j] += X[t, i] * X[t, j]
    return G


def projection_distance(A, x):
    P = A @ np.linalg.solve(A.T @ A, A.T)
    return float(np.sum((x - P @ x) ** 2))


# gram


def test_gram_identity():
    assert_allclose(gram(np.eye(2)), np.eye(2))


def test_gram_single_column():
    assert_allclose(gram(np.array([[3.0], [4.0]])), [[25.0]])


def test_gram_matches_triple_loop(rng):
    X = rng.standard_normal((4, 6))
    G = gram(X)
    assert_allclose(G, naive_gram(X), rtol=1e-12, atol=1e-12)
    assert np.array_equal(G, G.T)


# sym_eigen


def test_sym_eigen_perturbed_ones():
    assert_allclose(sym_eigen(make_M(3, 0.5)), [3.5, 0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("A, expected", [(np.eye(4), [1, 1, 1, 1]), (np.diag([5.0, 2.0, 1.0]), [5, 2, 1])])
def test_sym_eigen_trivial(A, expected):
    assert_allclose(sym_eigen(A), expected, atol=1e-14)


def test_sym_eigen_rejects_asymmetric():
    with pytest.raises(NotSymmetricError, match="not symmetric"):
        sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sym_eigen_rejects_indefinite_as_psd():
    with pytest.raises(NotPSDError):
        sym_eigen(np.diag([1.0, -1.0]))
    assert_allclose(sym_eigen(np.diag([1.0, -1.0]), psd=False), [1.0, -1.0])


def test_sym_eigen_clamps_roundoff_negatives():
    A = np.diag([1.0, -1e-12])
    assert sym_eigen(A)[-1] == 0.0


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
@pytest.mark.parametrize("n", [1, 2, 5, 12, 31])
def test_sym_eigen_residual(rng, method, n):
    B = rng.standard_normal((n, n + 2))
    A = B @ B.T
    w, V = sym_eigen(A, vectors=True, method=method)
    assert np.all(np.diff(w) <= 0)
    assert np.abs(A @ V - V * w).max() <= 1e-8 * np.linalg.norm(A)
    assert_allclose(V.T @ V, np.eye(n), atol=1e-10)
    assert abs(w.sum() - np.trace(A)) <= 1e-10 * np.trace(A)


def test_jacobi_agrees_with_lapack(rng):
    for n in (3, 8, 20, 60):
        B = rng.standard_normal((n, n))
        A = B + B.T
        w, _ = jacobi_eigh(A, vectors=False)
        assert_allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-11 * np.linalg.norm(A))


def test_spectrum_pads_wide_matrices(rng):
    X = rng.standard_normal((3, 7))
    s = spectrum(X)
    assert s.shape == (7,)
    assert np.all(s[3:] == 0.0)
    assert_allclose(s, sym_eigen(gram(X)), atol=1e-12)


# rank_k_error


def test_rank_k_error_identity_full_rank():
    assert rank_k_error(np.eye(4), 4) == 0.0


def test_rank_k_error_zero_is_frobenius(rng):
    X = rng.standard_normal((3, 5))
    assert_allclose(rank_k_error(X, 0), np.sum(X * X), rtol=1e-12)


def test_rank_k_error_matches_svd_truncation(rng):
    X = rng.standard_normal((5, 7))
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    X2 = (U[:, :2] * s[:2]) @ Vt[:2]
    assert_allclose(rank_k_error(X, 2), np.sum((X - X2) ** 2), rtol=1e-10)


def test_rank_k_error_block_instance():
    from volcol.hardness import HardInstanceSpec, make_block_instance

    spec = HardInstanceSpec(k=2, n0=3, delta=0.5)
    assert_allclose(rank_k_error(make_block_instance(spec), 2), (6 - 2) * 0.5, rtol=1e-10)


def test_rank_k_error_range():
    with pytest.raises(ValueError):
        rank_k_error(np.eye(3), 4)


def test_rank_k_error_is_tail_of_gram_spectrum(rng):
    X = rng.standard_normal((6, 4))
    sigma = sym_eigen(gram(X))
    for k in range(5):
        assert_allclose(rank_k_error(X, k), sigma[k:].sum(), rtol=1e-10, atol=1e-12)


# residual_trace


@pytest.mark.parametrize("r", [0, 1, 3, 5])
def test_residual_trace_identity(r):
    assert_allclose(residual_trace(np.eye(5), range(r)), 5 - r, atol=1e-12)


def test_residual_trace_single_block():
    n, delta = 6, 0.3
    X = psd_sqrt(make_M(n, delta))
    for r in (1, 2, 4):
        expected = (n - r) * delta * (1 + 1 / (r + delta))
        assert_allclose(residual_trace(X, range(r)), expected, rtol=1e-10)


def test_residual_trace_matches_determinant_distances(rng):
    X = rng.standard_normal((4, 6))
    C = (0, 2)
    expected = sum(squared_distance_det(X[:, C], X[:, u]) for u in range(6) if u not in C)
    assert_allclose(residual_trace(X, C), expected, rtol=1e-9)


def test_residual_trace_rank_deficient_subset(rng):
    X = rng.standard_normal((4, 5))
    X[:, 1] = 2.0 * X[:, 0]
    assert_allclose(residual_trace(X, (0, 1)), residual_trace(X, (0,)), rtol=1e-10)


def test_residual_trace_spanning_subset_is_zero(rng):
    X = rng.standard_normal((3, 6))
    assert residual_trace(X, (0, 1, 2)) == 0.0


matrices = st.tuples(st.integers(2, 6), st.integers(2, 7), st.integers(0, 2**32 - 1)).map(
    lambda t: np.random.default_rng(t[2]).standard_normal((t[0], t[1]))
)


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_pythagoras(X, data):
    n = X.shape[1]
    C = data.draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    fro2 = np.sum(X * X)
    res = residual_trace(X, C)
    if C:
        Q, _ = np.linalg.qr(X[:, sorted(C)])
        captured = np.sum((Q.T @ X) ** 2)
    else:
        captured = 0.0
    assert abs(res + captured - fro2) <= 1e-8 * fro2


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_monotone_in_subset(X, data):
    n = X.shape[1]
    big = data.draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    small = big[: data.draw(st.integers(0, len(big)))]
    fro2 = np.sum(X * X)
    assert residual_trace(X, big) <= residual_trace(X, small) + 1e-10 * fro2


# squared_distance_det


def test_squared_distance_axis():
    assert_allclose(squared_distance_det(np.array([[1.0], [0.0]]), [3.0, 4.0]), 16.0)


def test_squared_distance_in_span(rng):
    A = rng.standard_normal((5, 2))
    assert squared_distance_det(A, A @ [0.3, -2.0]) <= 1e-12 * 10


def test_squared_distance_matches_normal_equations(rng):
    for _ in range(20):
        A = rng.standard_normal((5, 2))
        x = rng.standard_normal(5)
        assert_allclose(squared_distance_det(A, x), projection_distance(A, x), rtol=1e-8)


def test_squared_distance_dependent_columns():
    A = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
    with pytest.raises(DependentColumnsError, match="dependent columns"):
        squared_distance_det(A, [1.0, 0.0, 0.0])


# project_out


def test_project_out_identity():
    Y = project_out(np.eye(3), 0)
    assert_allclose(Y, np.diag([0.0, 1.0, 1.0]))


def test_project_out_idempotent(rng):
    X = rng.standard_normal((4, 5))
    Y = project_out(X, 2)
    assert_allclose(project_out(Y, 2), Y)
    assert np.abs(X[:, 2] @ Y).max() <= 1e-10 * np.linalg.norm(X)


def test_project_out_zero_column_is_noop(rng):
    X = rng.standard_normal((3, 4))
    X[:, 1] = 0.0
    assert_allclose(project_out(X, 1), X)


def test_project_out_consistent_with_residual(rng):
    X = rng.standard_normal((4, 6))
    for j in range(6):
        assert_allclose(residual_trace(X, (j,)), np.sum(project_out(X, j) ** 2), rtol=1e-10)


# psd_sqrt


def test_psd_sqrt_trivial():
    assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
    assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)


def test_psd_sqrt_perturbed_ones():
    A = make_M(3, 0.5)
    X = psd_sqrt(A)
    assert np.linalg.norm(X.T @ X - A) <= 1e-8 * np.linalg.norm(A)
    assert_allclose(np.sort(np.linalg.eigvalsh(X))[::-1], np.sqrt([3.5, 0.5, 0.5]), atol=1e-12)


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(NotPSDError, match="not PSD"):
        psd_sqrt(np.diag([1.0, -0.5]))


# helpers


def test_as_subset_validation():
    assert as_subset([3, 1], 4) == (1, 3)
    with pytest.raises(ValueError):
        as_subset([1, 1], 4)
    with pytest.raises(ValueError):
        as_subset([4], 4)


def test_numerical_rank():
    assert numerical_rank([1.0, 1e-3, 1e-17]) == 2
    assert numerical_rank([0.0, 0.0]) == 0
