import numpy as np
import pytest

from ddlti.errors import NonSquareError, RankDeficientError
from ddlti.linalg import (
    Stability,
    ToleranceConfig,
    eigenvalues,
    in_span,
    is_schur_stable,
    kernel_basis,
    numerical_rank,
    right_inverse,
)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(rank_rtol=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(membership_rtol=1.5)


class TestNumericalRank:
    def test_identity(self):
        assert numerical_rank(np.eye(3)) == 3

    def test_zero(self):
        assert numerical_rank(np.zeros((2, 2))) == 0

    def test_proportional_rows(self):
        assert numerical_rank([[1.0, 2.0], [2.0, 4.0]]) == 1

    def test_constructed_rank(self):
        rng = np.random.default_rng(3)
        for r in (1, 3, 7):
            M = rng.standard_normal((50, r)) @ rng.standard_normal((r, 40))
            assert numerical_rank(M) == r

    def test_empty(self):
        assert numerical_rank(np.zeros((0, 4))) == 0


class TestKernelBasis:
    def test_coordinate_kernel(self):
        K = kernel_basis([[1.0, 0.0]])
        assert K.shape == (2, 1)
        assert abs(abs(K[1, 0]) - 1.0) < 1e-12

    def test_trivial_kernel(self):
        assert kernel_basis(np.eye(2)).shape == (2, 0)

    def test_hand_solved(self):
        K = kernel_basis([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert K.shape == (3, 1)
        direction = K[:, 0] / K[0, 0]
        np.testing.assert_allclose(direction, [1.0, -1.0, 0.0], atol=1e-12)

    def test_rank_nullity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            M = rng.standard_normal((rng.integers(1, 8), rng.integers(1, 8)))
            assert numerical_rank(M) + kernel_basis(M).shape[1] == M.shape[1]

    def test_columns_annihilated(self):
        rng = np.random.default_rng(5)
        M = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 6))
        K = kernel_basis(M)
        assert np.linalg.norm(M @ K) < 1e-8 * np.linalg.norm(M)


class TestInSpan:
    def test_zero_vector(self):
        assert in_span(np.zeros(3), np.eye(3)[:, :1])

    def test_orthogonal(self):
        assert not in_span([1.0, 0.0], [[0.0], [1.0]])

    def test_scalar_multiple(self):
        assert in_span([3.0, 6.0], [[1.0], [2.0]])

    def test_least_squares_residual_property(self):
        rng = np.random.default_rng(9)
        G = rng.standard_normal((6, 3))
        for _ in range(10):
            assert in_span(G @ rng.standard_normal(3), G)

    def test_common_scaling(self):
        rng = np.random.default_rng(2)
        G = rng.standard_normal((5, 2))
        v = G @ rng.standard_normal(2)
        w = rng.standard_normal(5)
        for c in (1e-3, 1.0, 1e3):
            assert in_span(c * v, c * G)
            assert not in_span(c * w, c * G)


class TestRightInverse:
    def test_identity(self):
        np.testing.assert_allclose(right_inverse(np.eye(3)), np.eye(3), atol=1e-12)

    def test_minimum_norm(self):
        np.testing.assert_allclose(right_inverse([[2.0, 0.0]]), [[0.5], [0.0]], atol=1e-12)

    def test_hand_pseudoinverse(self):
        np.testing.assert_allclose(right_inverse([[1.0, 1.0]]), [[0.5], [0.5]], atol=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            right_inverse([[1.0, 2.0], [2.0, 4.0]])

    def test_right_identity(self):
        rng = np.random.default_rng(4)
        M = rng.standard_normal((3, 7))
        np.testing.assert_allclose(M @ right_inverse(M), np.eye(3), atol=1e-9)


class TestEigenvalues:
    def test_diagonal(self):
        np.testing.assert_allclose(eigenvalues(np.diag([1.0, 2.0, 3.0])), [1, 2, 3])

    def test_rotation_generator(self):
        w = eigenvalues([[0.0, -1.0], [1.0, 0.0]])
        np.testing.assert_allclose(sorted(w.imag), [-1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(w.real, 0.0, atol=1e-12)

    def test_nilpotent(self):
        np.testing.assert_allclose(eigenvalues([[0.0, 1.0], [0.0, 0.0]]), [0, 0])

    def test_non_square(self):
        with pytest.raises(NonSquareError):
            eigenvalues(np.zeros((2, 3)))

    def test_conjugate_closed(self):
        rng = np.random.default_rng(6)
        w = eigenvalues(rng.standard_normal((6, 6)))
        paired = np.sort_complex(w.conj())
        np.testing.assert_allclose(np.sort_complex(w), paired, atol=1e-7)


class TestSchurStability:
    def test_stable(self):
        assert is_schur_stable([[0.5]]) is Stability.STABLE

    def test_unstable(self):
        assert is_schur_stable([[2.0]]) is Stability.UNSTABLE

    def test_empty_matrix_stable(self):
        assert is_schur_stable(np.zeros((0, 0))) is Stability.STABLE

    def test_boundary(self):
        assert is_schur_stable([[1.0]]) is Stability.BOUNDARY

    def test_similarity_invariance(self):
        rng = np.random.default_rng(8)
        M = rng.standard_normal((4, 4))
        M *= 0.8 / np.max(np.abs(np.linalg.eigvals(M)))
        for _ in range(10):
            T = rng.standard_normal((4, 4)) + 3 * np.eye(4)
            if np.linalg.cond(T) > 1e3:
                continue
            assert is_schur_stable(T @ M @ np.linalg.inv(T)) is Stability.STABLE
