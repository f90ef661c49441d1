import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dppnla import det_submatrix, eig_sym, lstsq, pinv, truncated_svd_error
from dppnla.errors import DimensionError, ValidationError


def cofactor_det(a):
    """Independent determinant oracle: recursive cofactor expansion."""
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if m == 0:
        return 1.0
    if m == 1:
        return a[0, 0]
    total = 0.0
    for j in range(m):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * a[0, j] * cofactor_det(minor)
    return total


class TestEigSym:
    def test_identity(self):
        res = eig_sym(np.eye(2))
        assert_allclose(res.eigenvalues, [1.0, 1.0])
        assert_allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(2), atol=1e-12)

    def test_rank_one_ones(self):
        # characteristic polynomial of [[1,1],[1,1]] is l^2 - 2l, roots (2, 0)
        res = eig_sym([[1.0, 1.0], [1.0, 1.0]])
        assert_allclose(res.eigenvalues, [2.0, 0.0], atol=1e-12)

    def test_diagonal(self):
        res = eig_sym(np.diag([2.0, 1.0]))
        assert_allclose(res.eigenvalues, [2.0, 1.0])
        assert_allclose(np.abs(res.eigenvectors), np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_and_orthonormality(self, seed):
        gen = np.random.default_rng(seed)
        a = gen.standard_normal((7, 7))
        a = a + a.T
        w, q = eig_sym(a)
        assert np.all(np.diff(w) <= 0)
        assert_allclose(q @ np.diag(w) @ q.T, a, atol=1e-10 * np.linalg.norm(a))
        assert np.linalg.norm(q.T @ q - np.eye(7)) <= 1e-10

    @pytest.mark.parametrize("seed", range(5))
    def test_psd_eigenvalues_clamped(self, seed):
        gen = np.random.default_rng(100 + seed)
        b = gen.standard_normal((6, 3))
        w, _ = eig_sym(b @ b.T)
        assert w.min() >= -1e-10 * w.max()

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionError):
            eig_sym(np.zeros((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            eig_sym([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            eig_sym([[np.nan, 0.0], [0.0, 1.0]])


class TestPinv:
    def test_identity(self):
        assert_allclose(pinv(np.eye(3)), np.eye(3))

    def test_zero_matrix_transposed_shape(self):
        out = pinv(np.zeros((3, 2)))
        assert out.shape == (2, 3)
        assert_allclose(out, 0.0)

    def test_column_vector(self):
        assert_allclose(pinv(np.array([[1.0], [1.0]])), [[0.5, 0.5]])

    @pytest.mark.parametrize("shape", [(4, 4), (6, 3), (3, 6)])
    @pytest.mark.parametrize("seed", range(3))
    def test_penrose_identities(self, shape, seed):
        a = np.random.default_rng(seed).standard_normal(shape)
        ap = pinv(a)
        tol = 1e-8 * np.linalg.norm(a)
        assert_allclose(a @ ap @ a, a, atol=tol)
        assert_allclose(ap @ a @ ap, ap, atol=tol)
        assert_allclose((a @ ap).T, a @ ap, atol=tol)
        assert_allclose((ap @ a).T, ap @ a, atol=tol)


class TestDetSubmatrix:
    def test_diagonal(self):
        assert det_submatrix(np.diag([2.0, 3.0]), [0, 1], [0, 1]) == pytest.approx(6.0)

    def test_rank_one(self):
        assert det_submatrix(np.ones((2, 2)), [0, 1], [0, 1]) == pytest.approx(0.0)

    def test_empty_subset_is_one(self):
        assert det_submatrix(np.ones((3, 3)), [], []) == 1.0

    def test_rejects_mismatched_sizes(self):
        with pytest.raises(DimensionError):
            det_submatrix(np.eye(3), [0, 1], [0])

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_cofactor_expansion(self, seed):
        a = np.random.default_rng(seed).standard_normal((5, 5))
        for k in range(6):
            for rows in itertools.combinations(range(5), k):
                for cols in itertools.combinations(range(5), k):
                    expected = cofactor_det(a[np.ix_(rows, cols)]) if k else 1.0
                    got = det_submatrix(a, list(rows), list(cols))
                    assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @given(
        st.lists(
            st.lists(st.integers(min_value=-5, max_value=5), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_full_determinant_integer_matrices(self, entries):
        a = np.array(entries, dtype=float)
        got = det_submatrix(a, [0, 1, 2], [0, 1, 2])
        assert got == pytest.approx(cofactor_det(a), abs=1e-9)


class TestLstsq:
    def test_identity(self):
        assert_allclose(lstsq(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_overdetermined_column(self):
        # normal equations: (X^T X)^{-1} X^T y = (0 + 2) / 2
        assert_allclose(lstsq(np.array([[1.0], [1.0]]), [0.0, 2.0]), [1.0])

    def test_orthonormal_columns(self):
        gen = np.random.default_rng(3)
        q, _ = np.linalg.qr(gen.standard_normal((6, 3)))
        y = gen.standard_normal(6)
        assert_allclose(lstsq(q, y), q.T @ y, atol=1e-12)

    def test_rejects_length_mismatch(self):
        with pytest.raises(DimensionError):
            lstsq(np.eye(3), [1.0, 2.0])


class TestTruncatedSvdError:
    def test_diagonal_nuclear(self):
        assert truncated_svd_error(np.diag([2.0, 1.0]), 1, "nuclear") == pytest.approx(1.0)

    def test_diagonal_fro2(self):
        assert truncated_svd_error(np.diag([2.0, 1.0]), 1, "fro2") == pytest.approx(1.0)

    def test_exact_rank(self):
        gen = np.random.default_rng(0)
        b = gen.standard_normal((5, 2))
        assert truncated_svd_error(b @ gen.standard_normal((2, 4)), 2, "fro2") == pytest.approx(
            0.0, abs=1e-20
        )

    def test_rejects_bad_rank(self):
        with pytest.raises(ValidationError):
            truncated_svd_error(np.eye(2), 3)
