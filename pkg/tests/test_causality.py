"""Restriction construction, the Wald statistic and the chi-square tail."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.stats import chi2

from asymcause.causality import (
    build_restrictions,
    chi_square_upper_tail,
    coef_position,
    unvec,
    vec,
    wald_test,
)
from asymcause.varmodel import VarSpec, build_design, estimate_var

from .oracles import chi2_upper_tail_mp, squared_t_ratio


def test_vec_column_stacking():
    matrix = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert_allclose(vec(matrix), [1.0, 3.0, 2.0, 4.0])


def test_vec_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        matrix = rng.standard_normal((3, 7))
        assert_allclose(unvec(vec(matrix), 3), matrix)


def test_coef_position_formula():
    # n=2, l=1: vec positions are [icpt_eq0, icpt_eq1, v0l1_eq0, v0l1_eq1, v1l1_eq0, v1l1_eq1]
    spec = VarSpec(2, 1)
    assert coef_position(spec, variable=1, lag=1, equation=0) == 4
    assert coef_position(spec, variable=1, lag=1, equation=1) == 5
    assert coef_position(spec, variable=0, lag=1, equation=0) == 2
    spec = VarSpec(3, 2, 1)
    # column of variable v at lag j is 1 + (j-1)*n + v; position = column*n + equation
    assert coef_position(spec, 2, 3, 1) == (1 + 2 * 3 + 2) * 3 + 1


def test_positions_match_coefficient_matrix():
    rng = np.random.default_rng(3)
    spec = VarSpec(2, 2, 1)
    data = np.cumsum(rng.standard_normal((2, 60)), axis=1)
    fit = estimate_var(data, spec)
    alpha = vec(fit.coefficients)
    for variable in range(2):
        for equation in range(2):
            for lag in range(1, 4):
                column = 1 + (lag - 1) * 2 + variable
                pos = coef_position(spec, variable, lag, equation)
                assert alpha[pos] == fit.coefficients[equation, column]


def test_restriction_matrix_single_lag():
    spec = VarSpec(2, 1)
    restrictions = build_restrictions(spec, cause=1, effect=0)
    assert restrictions.matrix.shape == (1, 6)
    assert restrictions.matrix.sum() == 1.0
    assert restrictions.matrix[0, 4] == 1.0


def test_restrictions_never_touch_augmentation_lags():
    spec = VarSpec(2, 3, 1)
    restrictions = build_restrictions(spec, cause=0, effect=1)
    assert restrictions.matrix.shape == (3, 2 * spec.n_regressors)
    assert restrictions.matrix.shape[1] == 18
    # lag-4 block occupies columns 7..8 of the coefficient matrix
    lag4_positions = [coef_position(spec, v, 4, e) for v in range(2) for e in range(2)]
    assert restrictions.matrix[:, lag4_positions].sum() == 0.0
    assert all(row.sum() == 1.0 for row in restrictions.matrix)
    cols_with_ones = restrictions.matrix.sum(axis=0)
    assert cols_with_ones.max() == 1.0


def test_restriction_gather_matches_manual():
    rng = np.random.default_rng(9)
    for _ in range(5):
        spec = VarSpec(2, int(rng.integers(1, 4)), int(rng.integers(0, 2)))
        data = np.cumsum(rng.standard_normal((2, 80)), axis=1)
        fit = estimate_var(data, spec)
        restrictions = build_restrictions(spec, 1, 0)
        gathered = restrictions.matrix @ vec(fit.coefficients)
        manual = np.array(
            [fit.coefficients[0, 1 + (j - 1) * 2 + 1] for j in range(1, spec.lag_order + 1)]
        )
        assert_allclose(gathered, manual, atol=1e-14)


def test_cause_equals_effect_rejected():
    with pytest.raises(ValueError):
        build_restrictions(VarSpec(2, 1), 1, 1)


def test_zero_restricted_coefficients_give_zero_wald():
    rng = np.random.default_rng(1)
    spec = VarSpec(2, 2)
    data = np.cumsum(rng.standard_normal((2, 70)), axis=1)
    fit = estimate_var(data, spec)
    zeroed = fit.coefficients.copy()
    restrictions = build_restrictions(spec, 1, 0)
    for pos in restrictions.positions:
        zeroed[pos % 2, pos // 2] = 0.0
    from dataclasses import replace

    fit0 = replace(fit, coefficients=zeroed)
    result = wald_test(fit0, restrictions)
    assert result.wald == 0.0
    assert result.causal_parameter == 0.0
    assert result.asymptotic_p == 1.0


def test_single_restriction_equals_squared_t_ratio():
    rng = np.random.default_rng(17)
    data = np.cumsum(rng.standard_normal((2, 90)), axis=1)
    spec = VarSpec(2, 1)
    fit = estimate_var(data, spec)
    restrictions = build_restrictions(spec, 1, 0)
    result = wald_test(fit, restrictions)
    targets, design = build_design(data, spec)
    oracle = squared_t_ratio(targets, design, equation=0, column=2)
    assert_allclose(result.wald, oracle, rtol=1e-8)


def test_degrees_of_freedom_exclude_augmentation():
    rng = np.random.default_rng(23)
    data = np.cumsum(rng.standard_normal((2, 100)), axis=1)
    spec = VarSpec(2, 3, 2)
    fit = estimate_var(data, spec)
    result = wald_test(fit, build_restrictions(spec, 1, 0))
    assert result.df == 3
    assert result.lag_order == 3
    assert result.augmentation == 2


def test_scale_invariance():
    rng = np.random.default_rng(31)
    data = np.cumsum(rng.standard_normal((2, 150)), axis=1) + 5.0
    spec = VarSpec(2, 2, 1)
    base = wald_test(estimate_var(data, spec), build_restrictions(spec, 1, 0)).wald
    for scales in ([7.0, 7.0], [3.0, 0.02], [1e4, 1.0]):
        scaled = data * np.asarray(scales)[:, np.newaxis]
        value = wald_test(estimate_var(scaled, spec), build_restrictions(spec, 1, 0)).wald
        assert abs(value - base) / base < 1e-6


def test_causal_parameter_is_sum_of_restricted_coefficients():
    rng = np.random.default_rng(37)
    data = np.cumsum(rng.standard_normal((2, 90)), axis=1)
    spec = VarSpec(2, 2)
    fit = estimate_var(data, spec)
    result = wald_test(fit, build_restrictions(spec, 1, 0))
    manual = fit.coefficients[0, 2] + fit.coefficients[0, 4]
    assert_allclose(result.causal_parameter, manual, atol=1e-14)


def test_wald_null_distribution_sane():
    from asymcause.simulate import _null_blocks, _rep_rng, simulate_var

    spec = VarSpec(2, 2, 1)
    blocks = _null_blocks(2)
    threshold = chi2.ppf(0.95, 2)
    rejections = 0
    for rep in range(300):
        data = simulate_var(blocks, 200, _rep_rng(555, rep))
        fit = estimate_var(data, spec)
        rejections += wald_test(fit, build_restrictions(spec, 1, 0)).wald > threshold
    assert 0.02 <= rejections / 300 <= 0.09


def test_chi_square_tail_at_zero():
    for df in (1, 2, 5, 20):
        assert chi_square_upper_tail(0.0, df) == 1.0


def test_chi_square_tail_standard_quantiles():
    assert abs(chi_square_upper_tail(3.841, 1) - 0.05) < 1e-4
    assert abs(chi_square_upper_tail(6.358, 3) - 0.0954) < 5e-4


def test_chi_square_tail_against_high_precision_oracle():
    for df in (1, 2, 3, 10, 50):
        for x in (0.01, 0.5, 3.0, 11.34, 60.0, 200.0):
            assert abs(chi_square_upper_tail(x, df) - chi2_upper_tail_mp(x, df)) < 1e-10


def test_chi_square_tail_monotone():
    grid = np.linspace(0.0, 40.0, 200)
    values = [chi_square_upper_tail(x, 3) for x in grid]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_chi_square_tail_rejects_negative():
    with pytest.raises(ValueError):
        chi_square_upper_tail(-0.5, 2)
    with pytest.raises(ValueError):
        chi_square_upper_tail(1.0, 0)


@given(
    st.floats(min_value=0.0, max_value=150.0),
    st.integers(min_value=1, max_value=30),
)
@settings(max_examples=200, deadline=None)
def test_chi_square_tail_matches_scipy(x, df):
    assert abs(chi_square_upper_tail(x, df) - chi2.sf(x, df)) < 1e-12
