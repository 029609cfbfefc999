import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zeroloss.errors import InvalidInputError, NoPermutationError
from zeroloss.numlin import (
    Permutation,
    Tolerance,
    invertible_block_permutation,
    penrose_residuals,
    pinv,
    rank,
    rotation_to,
)


def random_matrix(rng, rows, cols, r):
    """Matrix of exact rank r with singular values spread over two decades."""
    U, _ = np.linalg.qr(rng.standard_normal((rows, rows)))
    V, _ = np.linalg.qr(rng.standard_normal((cols, cols)))
    s = np.logspace(0, -2, r) * rng.uniform(0.5, 3.0)
    return (U[:, :r] * s) @ V[:, :r].T


class TestPinv:
    def test_identity(self):
        np.testing.assert_array_equal(pinv(np.eye(3)), np.eye(3))

    def test_diag_with_zero(self):
        np.testing.assert_allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-15)

    def test_row_vector(self):
        A = np.array([[1.0, 1.0]])
        X = pinv(A)
        np.testing.assert_allclose(X, [[0.5], [0.5]], atol=1e-15)
        assert max(penrose_residuals(A, X)) < 1e-15

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pinv(np.zeros((2, 3))), np.zeros((3, 2)))

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            pinv(np.array([[1.0, np.nan]]))

    @pytest.mark.parametrize("rows,cols", [(6, 3), (3, 6), (5, 5)])
    def test_penrose_all_ranks(self, rng, rows, cols):
        for r in range(1, min(rows, cols) + 1):
            A = random_matrix(rng, rows, cols, r)
            assert max(penrose_residuals(A, pinv(A))) < 1e-9

    def test_agrees_with_numpy(self, rng):
        A = random_matrix(rng, 7, 4, 3)
        np.testing.assert_allclose(pinv(A), np.linalg.pinv(A, rcond=1e-10), atol=1e-10)

    def test_one_sided_inverses(self, rng):
        wide = rng.standard_normal((3, 5))
        np.testing.assert_allclose(wide @ pinv(wide), np.eye(3), atol=1e-10)
        tall = rng.standard_normal((5, 3))
        np.testing.assert_allclose(pinv(tall) @ tall, np.eye(3), atol=1e-10)

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
    def test_penrose_property(self, rows, cols, seed):
        rng = np.random.default_rng(seed)
        r = rng.integers(1, min(rows, cols) + 1)
        A = random_matrix(rng, rows, cols, r)
        assert max(penrose_residuals(A, pinv(A))) < 1e-9


class TestRank:
    def test_examples(self, rng):
        assert rank(np.eye(4)) == 4
        assert rank(np.zeros((3, 3))) == 0
        assert rank(np.outer(rng.standard_normal(4), rng.standard_normal(5))) == 1

    def test_tolerance_cutoff(self):
        A = np.diag([1.0, 1e-12])
        assert rank(A) == 1
        assert rank(A, Tolerance(rank_rel_tol=1e-13)) == 2

    def test_tolerance_validation(self):
        with pytest.raises(InvalidInputError):
            Tolerance(rank_rel_tol=0.0)
        with pytest.raises(InvalidInputError):
            Tolerance(identity_abs_tol=1.5)


def assert_special_orthogonal(R, tol=1e-12):
    np.testing.assert_allclose(R.T @ R, np.eye(R.shape[0]), atol=tol)
    assert abs(np.linalg.det(R) - 1.0) < 1e-8


class TestRotation:
    def test_aligned_is_identity(self):
        e1 = np.array([1.0, 0.0, 0.0])
        np.testing.assert_array_equal(rotation_to(e1, e1), np.eye(3))

    def test_planar_minus_quarter_turn(self):
        a = np.array([0.0, 1.0])
        b = np.array([1.0, 1.0]) / np.sqrt(2)
        R = rotation_to(a, b)
        c, s = np.cos(-np.pi / 4), np.sin(-np.pi / 4)
        np.testing.assert_allclose(R, [[c, -s], [s, c]], atol=1e-15)
        assert_special_orthogonal(R)

    def test_random_dim7(self, rng):
        for _ in range(20):
            a, b = (v / np.linalg.norm(v) for v in rng.standard_normal((2, 7)))
            R = rotation_to(a, b)
            np.testing.assert_allclose(R @ a, b, atol=1e-12)
            assert_special_orthogonal(R)
            # acts as identity on the complement of span{a, b}
            basis, _ = np.linalg.qr(np.column_stack([a, b, rng.standard_normal((7, 5))]))
            comp = basis[:, 2:]
            np.testing.assert_allclose(R @ comp, comp, atol=1e-12)

    def test_antipodal(self):
        a = np.array([1.0, 0.0, 0.0])
        R = rotation_to(a, -a)
        np.testing.assert_allclose(R @ a, -a, atol=1e-15)
        assert_special_orthogonal(R)
        # companion axis is e2, the first basis vector not parallel to e1
        np.testing.assert_allclose(R @ np.array([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0], atol=1e-15)

    def test_nearly_antipodal(self, rng):
        a = rng.standard_normal(5)
        a /= np.linalg.norm(a)
        b = -a + 1e-7 * rng.standard_normal(5)
        b /= np.linalg.norm(b)
        R = rotation_to(a, b)
        np.testing.assert_allclose(R @ a, b, atol=1e-12)
        assert_special_orthogonal(R, 1e-10)

    def test_rejects_zero_and_non_unit(self):
        with pytest.raises(InvalidInputError):
            rotation_to(np.zeros(3), np.array([1.0, 0, 0]))
        with pytest.raises(InvalidInputError):
            rotation_to(np.array([2.0, 0.0]), np.array([1.0, 0.0]))
        with pytest.raises(InvalidInputError):
            rotation_to(np.array([1.0]), np.array([1.0]))

    @given(st.integers(2, 9), st.integers(0, 2**31))
    def test_property(self, n, seed):
        rng = np.random.default_rng(seed)
        a, b = (v / np.linalg.norm(v) for v in rng.standard_normal((2, n)))
        R = rotation_to(a, b)
        np.testing.assert_allclose(R @ a, b, atol=1e-12)
        np.testing.assert_allclose(R.T @ R, np.eye(n), atol=1e-10)
        assert abs(np.linalg.det(R) - 1.0) < 1e-8


class TestBlockPermutation:
    def test_identity_case(self):
        assert invertible_block_permutation(np.eye(3), 2).images[:2] == (0, 1)

    def test_only_one_block_invertible(self):
        A = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        perm = invertible_block_permutation(A, 2)
        assert set(perm.images[:2]) == {1, 2}
        assert abs(np.linalg.det(perm.apply_rows(A)[:2, :2])) > 0

    def test_random_against_brute_force(self, rng):
        A = rng.standard_normal((6, 4))
        A[:3] = 0.0  # only rows 3..5 carry information in the leading rows
        A[0, 0] = 1e-3
        perm = invertible_block_permutation(A, 4)
        block = perm.apply_rows(A)[:4, :4]
        assert np.linalg.svd(block, compute_uv=False)[-1] > 0
        exists = any(abs(np.linalg.det(A[list(rows), :4])) > 1e-12
                     for rows in itertools.combinations(range(6), 4))
        assert exists

    def test_matrix_form_is_orthogonal(self, rng):
        A = rng.standard_normal((5, 3))
        perm = invertible_block_permutation(A, 3)
        P = perm.matrix()
        np.testing.assert_array_equal(P @ A, perm.apply_rows(A))
        np.testing.assert_array_equal(P.T @ P, np.eye(5))

    def test_rank_deficient_columns(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with pytest.raises(NoPermutationError):
            invertible_block_permutation(A, 2)

    def test_permutation_validation(self):
        with pytest.raises(InvalidInputError):
            Permutation((0, 0, 1))
        p = Permutation((2, 0, 1))
        assert p.inverse().apply_rows(p.apply_rows(np.arange(3))).tolist() == [0, 1, 2]
