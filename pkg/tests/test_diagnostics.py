"""Unit-root, normality and ARCH diagnostics."""
from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from asymcause.diagnostics import (
    CONSTANT,
    TREND,
    _adf_regression,
    _gls_detrend,
    doornik_hansen,
    mv_arch_test,
    ng_perron_mza,
    var_residual_diagnostics,
)
from asymcause.errors import LengthError, SingularityError


def random_walk(seed, t=240):
    return np.cumsum(np.random.default_rng(seed).standard_normal(t))


def test_mza_formula_against_direct_arithmetic():
    y = random_walk(5, t=60)
    result = ng_perron_mza(y, CONSTANT, max_lag=0)
    detrended = _gls_detrend(y, CONSTANT)
    b0, coeffs, sigma2, _ = _adf_regression(detrended, 0, 0)
    s2_ar = sigma2 / (1.0 - coeffs.sum()) ** 2
    t = len(y)
    expected = (detrended[-1] ** 2 / t - s2_ar) / (
        2.0 * np.sum(detrended[:-1] ** 2) / t**2
    )
    assert_allclose(result.statistic_mza, expected, rtol=1e-12)
    assert result.lag_used == 0


def test_random_walk_levels_rarely_reject():
    fails = 0
    for seed in range(200):
        result = ng_perron_mza(random_walk(seed))
        fails += not result.rejects("5%")
    assert fails / 200 >= 0.90


def test_linear_ramp_with_trend_detrending_strongly_negative():
    rng = np.random.default_rng(3)
    ramp = 5.0 + 2.0 * np.arange(120.0) + 0.5 * rng.standard_normal(120)
    result = ng_perron_mza(ramp, TREND)
    assert result.statistic_mza < -14.2


def test_differenced_series_more_negative_than_level():
    for seed in (1, 2, 3, 4, 5):
        levels = np.cumsum(1.0 + np.random.default_rng(seed).standard_normal(241))
        level_stat = ng_perron_mza(levels).statistic_mza
        diff_stat = ng_perron_mza(np.diff(levels)).statistic_mza
        assert diff_stat < level_stat


def test_critical_values_and_decisions():
    result = ng_perron_mza(random_walk(11))
    assert result.critical_values == {"1%": -13.80, "5%": -8.10, "10%": -5.70}
    for level, cv in result.critical_values.items():
        assert result.decision_at[level] == (result.statistic_mza < cv)
    trended = ng_perron_mza(random_walk(11), TREND)
    assert trended.critical_values["5%"] == -17.30


def test_short_series_rejected():
    with pytest.raises(LengthError):
        ng_perron_mza(np.arange(20.0))


def test_unknown_detrending_rejected():
    with pytest.raises(ValueError):
        ng_perron_mza(random_walk(0), "quadratic")


def test_doornik_hansen_size_under_normality():
    rejections = 0
    reps = 400
    for seed in range(reps):
        residuals = np.random.default_rng(seed).standard_normal((2, 500))
        _, p = doornik_hansen(residuals)
        rejections += p < 0.05
    assert 0.02 <= rejections / reps <= 0.08


def test_doornik_hansen_power_against_heavy_tails():
    rejections = 0
    for seed in range(50):
        residuals = np.random.default_rng(seed).standard_t(3, size=(2, 500))
        _, p = doornik_hansen(residuals)
        rejections += p < 0.05
    assert rejections >= 45


def test_doornik_hansen_invariances():
    rng = np.random.default_rng(7)
    residuals = rng.standard_t(6, size=(3, 400))
    stat, _ = doornik_hansen(residuals)
    permuted, _ = doornik_hansen(residuals[[2, 0, 1]])
    scaled, _ = doornik_hansen(residuals * np.array([[5.0], [0.2], [40.0]]))
    assert abs(permuted - stat) / stat < 1e-6
    assert abs(scaled - stat) / stat < 1e-6


def test_doornik_hansen_singular_covariance():
    base = np.random.default_rng(1).standard_normal((1, 200))
    duplicated = np.vstack([base, base])
    with pytest.raises(SingularityError):
        doornik_hansen(duplicated)
    with pytest.raises(SingularityError):
        doornik_hansen(np.vstack([np.ones((1, 200)), base]))


def test_doornik_hansen_needs_observations():
    with pytest.raises(LengthError):
        doornik_hansen(np.random.default_rng(0).standard_normal((3, 12)))


def arch_process(seed, t=500, coefficient=0.5):
    rng = np.random.default_rng(seed)
    out = np.zeros((2, t))
    for i in range(1, t):
        variance = 0.3 + coefficient * out[:, i - 1] ** 2
        out[:, i] = np.sqrt(variance) * rng.standard_normal(2)
    return out


def test_arch_size_under_homoskedasticity():
    rejections = 0
    reps = 400
    for seed in range(reps):
        residuals = np.random.default_rng(10_000 + seed).standard_normal((2, 500))
        _, p = mv_arch_test(residuals, 1)
        rejections += p < 0.05
    assert 0.02 <= rejections / reps <= 0.08


def test_arch_power_against_arch_process():
    rejections = 0
    for seed in range(50):
        _, p = mv_arch_test(arch_process(seed), 1)
        rejections += p < 0.05
    assert rejections >= 40


def test_arch_invariances():
    residuals = arch_process(3)
    stat, _ = mv_arch_test(residuals, 1)
    permuted, _ = mv_arch_test(residuals[[1, 0]], 1)
    scaled, _ = mv_arch_test(residuals * np.array([[3.0], [0.1]]), 1)
    assert abs(permuted - stat) / stat < 1e-6
    assert abs(scaled - stat) / stat < 1e-6


def test_arch_statistic_nonnegative_and_p_in_range():
    for seed in range(10):
        residuals = np.random.default_rng(seed).standard_normal((2, 300))
        stat, p = mv_arch_test(residuals, 2)
        assert stat >= 0.0
        assert 0.0 <= p <= 1.0


def test_arch_lag_validation():
    with pytest.raises(ValueError):
        mv_arch_test(np.random.default_rng(0).standard_normal((2, 100)), 0)


def test_bundled_diagnostics():
    residuals = arch_process(9)
    report = var_residual_diagnostics(residuals, 1)
    assert report.arch_p < 0.05
    assert report.lag_order_tested == 1
    assert 0.0 <= report.normality_p <= 1.0
