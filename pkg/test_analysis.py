"""
RIP 估计、乘积界、奇异值集中性、集券问题、复杂度表达式与矩检验
"""
import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from analysis.complexity import complexity_expressions, forward_sample_complexity
from analysis.concentration import singular_concentration_check
from analysis.coupon import (conjectured_lower_bound, coupon_collector_trials,
                             harmonic_expectation)
from analysis.moments import moment_battery
from analysis.rip import (exhaustive_rip_constant, product_rip_bound,
                          product_rip_vector_check, rip_constant_estimate)
from core.errors import ParameterError
from core.linalg import column_normalize
from genmodel.rng import stream
from genmodel.sampling import sample_sparse_dictionary
from genmodel.spec import desk_spec, paper_spec


def brute_force_rip(A, s):
    worst = 0.0
    for support in itertools.combinations(range(A.shape[1]), s):
        sv = np.linalg.svd(A[:, support], compute_uv=False)
        smin = sv[-1] if s <= A.shape[0] else 0.0
        worst = max(worst, 1.0 - smin ** 2, sv[0] ** 2 - 1.0)
    return worst


def test_exhaustive_rip_matches_brute_force():
    A = column_normalize(np.array([
        [1.0, 0.0, 0.5, -0.3, 0.2, 1.0],
        [0.0, 1.0, 0.5, 0.4, -0.7, 0.1],
        [0.2, -0.1, 1.0, 0.0, 0.3, -0.5],
        [0.0, 0.3, -0.2, 1.0, 0.6, 0.2],
    ]))
    for s in (1, 2, 3, 4):
        estimate = exhaustive_rip_constant(A, s)
        assert estimate.exhaustive
        assert estimate.trials == math.comb(6, s)
        assert estimate.delta_hat == pytest.approx(brute_force_rip(A, s), rel=1e-12, abs=1e-14)


def test_rip_of_identity_is_zero():
    estimate = rip_constant_estimate(np.eye(8), 3, trials=10)
    assert estimate.exhaustive
    assert estimate.delta_hat == pytest.approx(0.0, abs=1e-12)
    assert estimate.to_dict()["label"] == "exact"


def test_sampled_rip_is_a_nested_lower_bound():
    A = column_normalize(stream(0, "A").standard_normal((30, 60)))
    small = rip_constant_estimate(A, 5, trials=50, seed=3, exhaustive_limit=10)
    large = rip_constant_estimate(A, 5, trials=200, seed=3, exhaustive_limit=10)
    assert small.lower_bound and large.lower_bound
    assert large.delta_hat >= small.delta_hat
    with pytest.raises(ParameterError):
        rip_constant_estimate(A, 0, trials=10)


def test_product_rip_bound():
    assert product_rip_bound([0.1, 0.1]) == pytest.approx(0.21)
    assert product_rip_bound([0.0]) == 0.0
    assert product_rip_bound([0.5, 0.2]) == pytest.approx(max(1 - 0.4, 1.8 - 1))
    with pytest.raises(ParameterError):
        product_rip_bound([0.1, 1.0])


def test_product_bound_holds_on_sampled_vectors():
    for k in range(50):
        A1 = column_normalize(stream(k, "A1").standard_normal((6, 10)))
        A2 = column_normalize(stream(k, "A2").standard_normal((8, 6)))
        deltas = [exhaustive_rip_constant(A1, 2).delta_hat, exhaustive_rip_constant(A2, 6).delta_hat]
        check = product_rip_vector_check([A1, A2], deltas, sparsity=2, trials=100, seed=k)
        assert check.violations == 0
        assert check.min_ratio >= check.lower * (1 - 1e-10)
        assert check.max_ratio <= check.upper * (1 + 1e-10)


def test_singular_concentration():
    report = singular_concentration_check(20, 400, 4, trials=10, seed=1)
    assert report.in_regime
    assert report.passed
    assert len(report.deviations) == 10
    out_of_regime = singular_concentration_check(20, 50, 4, trials=3, seed=1)
    assert out_of_regime.passed is None
    with pytest.raises(ParameterError):
        singular_concentration_check(50, 20, 4, trials=3)


def test_coupon_collector_single_draws():
    estimate = coupon_collector_trials(20, 1, 5000, seed=0)
    assert harmonic_expectation(20) == pytest.approx(71.95, abs=0.01)
    assert abs(estimate.mean_draws - harmonic_expectation(20)) <= 3 * estimate.stderr


def test_coupon_collector_subset_draws_corridor():
    estimate = coupon_collector_trials(800, 3, 500, seed=0)
    bound = conjectured_lower_bound(800, 3)
    assert bound <= estimate.mean_draws <= 3 * bound
    assert coupon_collector_trials(5, 5, 10).mean_draws == 1.0
    with pytest.raises(ParameterError):
        coupon_collector_trials(5, 6, 10)


def test_forward_sample_complexity_at_paper_scale():
    rows = complexity_expressions(paper_spec(), delta=0.1, n=6400)
    a5a = next(row for row in rows if row.name == "A5a")
    assert a5a.value == pytest.approx(640000 * math.log(16000))
    assert a5a.value == pytest.approx(6.19e6, rel=1e-3)
    assert a5a.passed is False
    assert "二阶项" in a5a.note
    assert forward_sample_complexity(800, 2.0, 3, 0.1) == pytest.approx(a5a.value)

    lower = next(row for row in rows if row.name == "lower_bound")
    assert lower.value == pytest.approx(800 / 3 * math.log(800))
    assert lower.passed is True


def test_complexity_rows_cover_every_layer():
    rows = complexity_expressions(desk_spec())
    names = [(row.name, row.layer) for row in rows]
    assert names == [("A5a", 1), ("A5b", 1), ("B5", 1), ("B5", 2), ("lower_bound", 1)]
    assert all(row.passed is None for row in rows if row.name in ("A5a", "B5"))
    b5 = [row for row in rows if row.name == "B5"]
    assert b5[0].value == pytest.approx(rows[0].value)
    with pytest.raises(ParameterError):
        complexity_expressions(desk_spec(), delta=1.5)


def test_sparse_generator_moments():
    checks = moment_battery(100, 5000, 10, seed=0)
    names = [check.name for check in checks]
    assert names == ["inclusion", "pair_inclusion", "mean", "second_moment", "nonzero_square_mean",
                     "within_column_cross", "within_row_cross", "column_norm_bound"]
    for check in checks:
        assert check.within, check
    assert checks[0].expected == pytest.approx(0.1)
    exact = checks[names.index("nonzero_square_mean")]
    # Rademacher 非零元平方后没有随机性
    assert exact.expected == pytest.approx(10.0)
    assert exact.empirical == pytest.approx(10.0, rel=1e-12)
    assert exact.stderr < 1e-12


def test_product_rip_constant_respects_factor_bound():
    s = 1
    for k in range(50):
        A1 = column_normalize(stream(k, "A1").standard_normal((12, 20)))
        Q, _ = np.linalg.qr(stream(k, "Q").standard_normal((16, 12)))
        A2 = column_normalize(Q + 0.05 * stream(k, "noise").standard_normal((16, 12)))
        # A1 稠密，2s 稀疏向量经过 A1 后一般有 12 个非零元，所以 A2 取全部列
        deltas = [exhaustive_rip_constant(A1, 2 * s).delta_hat,
                  exhaustive_rip_constant(A2, 12).delta_hat]
        product = exhaustive_rip_constant(A2 @ A1, 2 * s)
        assert product.delta_hat <= product_rip_bound(deltas) + 1e-10, k


def test_sparse_dictionary_rip_concentrates():
    d, r, s_A = 400, 800, 20
    A = sample_sparse_dictionary(d, r, s_A, rng=stream(2, "sparse"))
    scaled = A / math.sqrt(d)
    assert_allclose(np.linalg.norm(scaled, axis=0), 1.0)
    estimate = rip_constant_estimate(scaled, 4, trials=2000, seed=2)
    assert estimate.lower_bound
    assert estimate.trials == 2000
    assert estimate.delta_hat < 0.5


def test_singular_concentration_for_wide_matrices():
    report = singular_concentration_check(10, 4000, 5, trials=20, seed=3)
    assert report.in_regime
    assert report.bound == pytest.approx(3 * math.sqrt(10 / 4000))
    assert report.quantiles()["median"] < report.bound
    again = singular_concentration_check(10, 4000, 5, trials=20, seed=3)
    assert again.deviations == report.deviations
