"""
核心线性代数原语与类型的测试
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import (DegenerateAtomError, DegenerateCodeError, DimensionError,
                         ParameterError)
from core.linalg import (column_normalize, least_squares_min_norm, min_singular_value,
                         spectral_norm)
from core.types import SupportSet, as_matrix, column_nonzero_counts


def test_spectral_norm_matches_svd():
    rng = np.random.default_rng(0)
    for shape in [(5, 9), (30, 12), (1, 4)]:
        A = rng.standard_normal(shape)
        assert spectral_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-8)


def test_spectral_norm_rejects_zero_matrix_and_handles_identity():
    with pytest.raises(ParameterError):
        spectral_norm(np.zeros((3, 4)))
    with pytest.raises(ParameterError):
        spectral_norm(np.eye(3), tol=0.0)
    assert spectral_norm(np.eye(6)) == pytest.approx(1.0)
    assert spectral_norm(np.diag([1.0, 2.0, 3.0])) == pytest.approx(3.0)


def test_spectral_norm_scales_with_absolute_value():
    A = np.random.default_rng(7).standard_normal((20, 30))
    base = spectral_norm(A)
    assert base == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-8)
    for c in (-2.0, 0.5):
        assert spectral_norm(c * A) == pytest.approx(abs(c) * base, rel=1e-9)


def test_spectral_norm_dominates_min_singular_value():
    rng = np.random.default_rng(8)
    for shape in [(15, 10), (10, 15), (6, 6)]:
        A = rng.standard_normal(shape)
        smin = min_singular_value(A)
        assert not smin.rank_deficient
        assert spectral_norm(A) >= smin.value >= 0.0
    deficient = np.outer(np.arange(1.0, 5.0), np.ones(3))
    assert spectral_norm(deficient) >= min_singular_value(deficient).value == 0.0


def test_min_singular_value_flags_rank_deficiency():
    A = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    result = min_singular_value(A)
    assert result.rank_deficient
    assert result.value == 0.0

    B = np.diag([3.0, 0.5, 2.0])
    result = min_singular_value(B)
    assert not result.rank_deficient
    assert result.value == pytest.approx(0.5)


def test_least_squares_recovers_exact_dictionary():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((6, 4))
    X = rng.standard_normal((4, 30))
    assert_allclose(least_squares_min_norm(A @ X, X), A, atol=1e-10)


def test_least_squares_minimum_norm_when_rows_are_deficient():
    # 第三行编码恒为零，对应列的最小范数解必须为零
    rng = np.random.default_rng(2)
    X = rng.standard_normal((3, 20))
    X[2] = 0.0
    B = rng.standard_normal((5, 20))
    A = least_squares_min_norm(B, X)
    assert_allclose(A[:, 2], 0.0, atol=1e-12)
    assert_allclose(A, B @ np.linalg.pinv(X), atol=1e-9)


def test_least_squares_rejects_zero_codes_and_bad_shapes():
    with pytest.raises(DegenerateCodeError):
        least_squares_min_norm(np.ones((3, 5)), np.zeros((2, 5)))
    with pytest.raises(DimensionError):
        least_squares_min_norm(np.ones((3, 5)), np.ones((2, 4)))


def test_column_normalize():
    A = np.array([[3.0, 0.0], [4.0, -2.0]])
    assert_allclose(column_normalize(A), [[0.6, 0.0], [0.8, -1.0]])

    with pytest.raises(DegenerateAtomError) as info:
        column_normalize(np.array([[1.0, 0.0, 1.0], [0.0, 0.0, 1.0]]))
    assert info.value.column == 1


def test_as_matrix_and_counts():
    assert as_matrix([1.0, 2.0, 3.0]).shape == (3, 1)
    with pytest.raises(ParameterError):
        as_matrix([[1.0, np.nan]])
    M = np.array([[0.0, 1.0], [1e-13, 2.0], [5.0, 0.0]])
    assert list(column_nonzero_counts(M)) == [1, 2]


def test_support_set():
    support = SupportSet.from_indices([4, 1, 7], 10)
    assert support.indices == (1, 4, 7)
    assert support.sparsity == 3 and len(support) == 3
    with pytest.raises(ParameterError):
        SupportSet.from_indices([1, 1], 5)
    with pytest.raises(ParameterError):
        SupportSet((2, 9), 5)


def test_least_squares_is_a_projection():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((4, 25))
    B = rng.standard_normal((6, 25))
    A = least_squares_min_norm(B, X)
    assert np.abs(least_squares_min_norm(A @ X, X) - A).max() < 1e-12
    # 行秩亏时走 SVD 分支，结果仍是同一个投影
    X[3] = X[0] + X[1]
    A = least_squares_min_norm(B, X)
    assert np.abs(least_squares_min_norm(A @ X, X) - A).max() < 1e-10


def test_column_normalize_is_idempotent():
    A = np.random.default_rng(5).standard_normal((7, 9))
    once = column_normalize(A)
    assert_allclose(np.linalg.norm(once, axis=0), 1.0, atol=1e-12)
    assert_allclose(column_normalize(once), once, atol=1e-15)
    unit = np.eye(4)
    assert_allclose(column_normalize(unit), unit, atol=1e-15)
