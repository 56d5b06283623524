"""
生成模型：分布律、结构校验、采样器与合成
"""
import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import DimensionError, ParameterError
from core.types import column_nonzero_counts
from genmodel.laws import NonzeroLaw
from genmodel.rng import make_rng, stream, trial_streams
from genmodel.sampling import (alpha_for_snr, indicator_matrix, perturb_dictionary,
                               sample_dense_dictionary,
                               sample_codes, sample_sparse_dictionary, sample_support,
                               snr_db)
from genmodel.spec import DeepModelSpec, desk_spec, paper_spec
from genmodel.synthesis import synthesize


def test_law_parse_and_moments():
    law = NonzeroLaw.parse("uniform_shell:1:2")
    assert law.describe() == "uniform_shell:1:2"
    assert law.amplitude_bound() == 2.0
    assert law.second_moment() == pytest.approx(7.0 / 3.0)
    assert NonzeroLaw.parse("rademacher").second_moment() == 1.0
    with pytest.raises(ParameterError):
        NonzeroLaw.parse("cauchy")
    with pytest.raises(ParameterError):
        NonzeroLaw.parse("uniform_shell:2:1")


def test_truncated_gaussian_law_is_bounded_with_unit_variance():
    law = NonzeroLaw.parse("gaussian_truncated:3")
    values = law.sample(20000, np.random.default_rng(0))
    assert np.abs(values).max() <= law.amplitude_bound() + 1e-12
    assert np.mean(values ** 2) == pytest.approx(1.0, abs=0.05)


def test_spec_validation():
    with pytest.raises(DimensionError):
        DeepModelSpec(dims=((60, 150), (40, 50)), code_sparsity=3, column_sparsities=(3,))
    with pytest.raises(ParameterError):
        DeepModelSpec(dims=((60, 150), (40, 60)), code_sparsity=0, column_sparsities=(3,))
    with pytest.raises(ParameterError):
        DeepModelSpec(dims=((60, 150), (40, 60)), code_sparsity=3, column_sparsities=())
    spec = paper_spec()
    assert spec.L == 2 and spec.r(1) == 800 and spec.d(2) == 100
    restored = DeepModelSpec.from_dict(spec.to_dict())
    assert restored.dims == spec.dims
    assert restored.column_sparsities == spec.column_sparsities
    assert restored.amplitudes() == spec.amplitudes()


def test_streams_are_reproducible_and_independent():
    a = stream(5, "A1").standard_normal(4)
    b = stream(5, "A1").standard_normal(4)
    c = stream(5, "X").standard_normal(4)
    assert_array_equal(a, b)
    assert not np.allclose(a, c)
    short = trial_streams(5, "rip", 3)
    long = trial_streams(5, "rip", 6)
    for g, h in zip(short, long):
        assert g.integers(0, 10 ** 9) == h.integers(0, 10 ** 9)


def test_sample_support_is_uniform_subset():
    rng = np.random.default_rng(3)
    counts = np.zeros(10)
    for _ in range(4000):
        support = sample_support(10, 3, rng)
        assert support.sparsity == 3
        counts[support.as_array()] += 1
    # 每个元素被选中的概率为 3/10
    assert_allclose(counts / 4000, 0.3, atol=0.03)
    with pytest.raises(ParameterError):
        sample_support(5, 6, rng)


def test_sparse_dictionary_structure():
    d, r, s_A = 20, 50, 4
    A = sample_sparse_dictionary(d, r, s_A, rng=np.random.default_rng(4))
    assert_array_equal(column_nonzero_counts(A), np.full(r, s_A))
    nz = A[A != 0]
    assert_allclose(np.abs(nz), math.sqrt(d / s_A))
    assert np.all(np.sum(A * A, axis=0) <= d + 1e-9)
    assert_array_equal(indicator_matrix(A), (A != 0).astype(float))


def test_codes_have_exact_sparsity_and_amplitudes():
    X = sample_codes(30, 100, 3, rng=np.random.default_rng(5))
    assert_array_equal(column_nonzero_counts(X), np.full(100, 3))
    nz = np.abs(X[X != 0])
    assert nz.min() >= 1.0 and nz.max() <= 2.0


def test_snr_conversion():
    assert snr_db(0.5) == pytest.approx(6.0206, abs=1e-4)
    assert snr_db(1.0) == 0.0
    for snr in (-3.0, 0.0, 3.0, 6.0, 9.0):
        assert snr_db(alpha_for_snr(snr)) == pytest.approx(snr)


def test_perturb_dictionary(caplog):
    A = np.eye(4)
    A0, snr = perturb_dictionary(A, 0.5, np.random.default_rng(6))
    assert A0.shape == A.shape and snr == pytest.approx(6.0206, abs=1e-4)
    with pytest.raises(ParameterError):
        perturb_dictionary(A, 0.0)
    with caplog.at_level(logging.WARNING):
        perturb_dictionary(A, alpha_for_snr(-3.0), np.random.default_rng(6))
    assert any("alpha" in rec.message for rec in caplog.records)


def test_synthesize_desk_instance():
    instance = synthesize(desk_spec(), 200, seed=2)
    assert instance.dictionary(1).shape == (60, 150)
    assert instance.dictionary(2).shape == (40, 60)
    assert instance.codes.shape == (150, 200)
    assert instance.observations.shape == (40, 200)
    for A in instance.dicts:
        assert_allclose(np.linalg.norm(A, axis=0), 1.0)
    assert_array_equal(column_nonzero_counts(instance.codes), np.full(200, 3))
    assert column_nonzero_counts(instance.layer_output(1)).max() <= 9
    assert_allclose(instance.recompute_observations(), instance.observations, atol=1e-12)
    assert_allclose(instance.product(1), instance.dictionary(2) @ instance.dictionary(1))
    assert sorted(instance.named_matrices()) == ["A1", "A2", "X", "Y", "Y1"]


def test_synthesize_is_deterministic():
    first = synthesize(desk_spec(), 50, seed=11)
    second = synthesize(desk_spec(), 50, seed=11)
    other = synthesize(desk_spec(), 50, seed=12)
    for name, M in first.named_matrices().items():
        assert_array_equal(M, second.named_matrices()[name])
    assert not np.array_equal(first.observations, other.observations)


def test_single_layer_instance_has_no_intermediates():
    spec = DeepModelSpec(dims=((20, 30),), code_sparsity=2)
    instance = synthesize(spec, 40, seed=0)
    assert instance.intermediates == []
    assert sorted(instance.named_matrices()) == ["A1", "X", "Y"]
    with pytest.raises(ParameterError):
        synthesize(spec, 0)


def test_column_prefix_does_not_depend_on_column_count():
    five = sample_sparse_dictionary(20, 5, 3, rng=make_rng(1))
    six = sample_sparse_dictionary(20, 6, 3, rng=make_rng(1))
    assert_array_equal(five, six[:, :5])
    codes = sample_codes(30, 40, 2, rng=make_rng(8))
    more = sample_codes(30, 90, 2, rng=make_rng(8))
    assert_array_equal(codes, more[:, :40])
    again = sample_sparse_dictionary(20, 5, 3, rng=make_rng(1))
    assert_array_equal(five, again)


def test_single_index_support_frequencies():
    rng = make_rng(21)
    trials = 100000
    counts = np.zeros(4)
    for _ in range(trials):
        counts[sample_support(4, 1, rng).as_array()] += 1
    assert_allclose(counts / trials, 0.25, atol=0.01)
    # 自由度 3 的卡方统计量，0.999 分位数约为 16.27
    expected = trials / 4
    assert np.sum((counts - expected) ** 2 / expected) < 16.27
    assert sample_support(5, 5, rng).indices == (0, 1, 2, 3, 4)


def test_pair_support_frequencies():
    rng = make_rng(22)
    trials = 100000
    counts = {}
    for _ in range(trials):
        pair = sample_support(6, 2, rng).indices
        counts[pair] = counts.get(pair, 0) + 1
    assert len(counts) == 15
    for pair, count in counts.items():
        assert pair[0] < pair[1]
        assert count / trials == pytest.approx(1.0 / 15.0, abs=0.005)


def test_sparse_dictionary_second_moments():
    d, r, s_A = 100, 5000, 10
    A = sample_sparse_dictionary(d, r, s_A, rng=make_rng(23))
    nz = A[A != 0]
    # Rademacher 非零元的平方恒为 d/s_A
    assert np.mean(nz ** 2) == pytest.approx(d / s_A, rel=1e-12)
    assert np.mean(A ** 2) == pytest.approx(1.0, abs=0.05)
    B = sample_sparse_dictionary(50, 2000, 5, rng=make_rng(24))
    cross = np.mean(B[:, :-1] * B[:, 1:])
    assert abs(cross) < 0.02


def test_code_second_moment_under_rademacher_law():
    X = sample_codes(100, 10000, 5, law=NonzeroLaw.parse("rademacher"), rng=make_rng(25))
    assert np.mean(X ** 2) == pytest.approx(0.05, abs=0.003)
    dense = sample_codes(8, 1, 8, law=NonzeroLaw.parse("rademacher"), rng=make_rng(25))
    assert_array_equal(np.abs(dense), np.ones((8, 1)))


def test_dense_dictionary_column_norms_and_determinism():
    A = sample_dense_dictionary(100, 200, make_rng(26))
    assert np.mean(np.linalg.norm(A, axis=0)) == pytest.approx(1.0, abs=0.05)
    assert_array_equal(A, sample_dense_dictionary(100, 200, make_rng(26)))
    single = sample_dense_dictionary(1, 1, make_rng(27))
    assert single.shape == (1, 1)
    assert_array_equal(single, sample_dense_dictionary(1, 1, make_rng(27)))
    with pytest.raises(ParameterError):
        sample_dense_dictionary(0, 3)


def test_perturbation_variance():
    d, cols = 100, 10000
    A = np.zeros((d, cols))
    A0, snr = perturb_dictionary(A, 0.5, make_rng(28))
    assert snr == pytest.approx(6.0206, abs=1e-4)
    assert np.var(A0 - A) == pytest.approx(0.25 / d, rel=0.1)
    A1, snr1 = perturb_dictionary(np.eye(3), 1.0, make_rng(28))
    assert snr1 == 0.0 and A1.shape == (3, 3)
