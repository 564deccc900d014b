"""Pre-test battery: unit roots, multivariate normality, multivariate ARCH.

The unit-root statistic is the modified Phillips-Perron MZa computed on
GLS-detrended data, with the spectral density estimated from an augmented
autoregression whose lag length is picked by the modified AIC.  Normality
of VAR residuals is checked with the omnibus skewness/kurtosis statistic on
components standardized through the correlation-matrix eigendecomposition
(the symmetric square root keeps the test invariant to variable order and
rescaling, unlike a Cholesky route).  Time-varying volatility is checked
with a multivariate LM test on the lagged outer-product elements of the
residuals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .causality import chi_square_upper_tail
from .errors import LengthError, SingularityError
from .series import TimeSeries
from .varmodel import VarSpec, estimate_var

CONSTANT = "constant"
TREND = "constant+trend"

MZA_CRITICAL_VALUES = {
    CONSTANT: {"1%": -13.80, "5%": -8.10, "10%": -5.70},
    TREND: {"1%": -23.80, "5%": -17.30, "10%": -14.20},
}


@dataclass
class UnitRootResult:
    """MZa statistic with its decision against the tabulated critical values."""

    statistic_mza: float
    lag_used: int
    detrending: str
    decision_at: dict[str, bool]
    critical_values: dict[str, float]

    def rejects(self, level: str) -> bool:
        return self.decision_at[level]


@dataclass
class MvDiagnostics:
    """Normality and ARCH statistics for one VAR's residuals."""

    normality_stat: float
    normality_p: float
    arch_stat: float
    arch_p: float
    lag_order_tested: int


def _deterministics(t: int, detrending: str) -> np.ndarray:
    if detrending == CONSTANT:
        return np.ones((t, 1))
    if detrending == TREND:
        return np.column_stack([np.ones(t), np.arange(1.0, t + 1.0)])
    raise ValueError(f"unknown detrending {detrending!r}")


def _gls_detrend(y: np.ndarray, detrending: str) -> np.ndarray:
    """Remove deterministics estimated under a local-to-unity alternative."""
    t = y.shape[0]
    z = _deterministics(t, detrending)
    cbar = -7.0 if detrending == CONSTANT else -13.5
    alpha = 1.0 + cbar / t
    ya = np.concatenate([y[:1], y[1:] - alpha * y[:-1]])
    za = np.vstack([z[:1], z[1:] - alpha * z[:-1]])
    delta, *_ = np.linalg.lstsq(za, ya, rcond=None)
    return y - z @ delta


def _ols_detrend(y: np.ndarray, detrending: str) -> np.ndarray:
    """Plain least-squares detrending, used only for lag selection."""
    z = _deterministics(y.shape[0], detrending)
    delta, *_ = np.linalg.lstsq(z, y, rcond=None)
    return y - z @ delta


def _adf_regression(
    detrended: np.ndarray, k: int, sample_anchor: int
) -> tuple[float, np.ndarray, float, float]:
    """Fit the augmented autoregression for the spectral-density estimate.

    Observations start at difference index ``sample_anchor`` so candidate
    lag lengths can share a common sample.  Returns (level coefficient,
    difference-lag coefficients, error variance, sum of squared lagged
    levels over the sample).
    """
    dy = np.diff(detrended)
    n_obs = dy.shape[0] - sample_anchor
    if n_obs <= k + 2:
        raise LengthError("series too short for the requested autoregression")
    dep = dy[sample_anchor:]
    cols = [detrended[sample_anchor:-1]]
    for j in range(1, k + 1):
        cols.append(dy[sample_anchor - j : dy.shape[0] - j])
    design = np.column_stack(cols)
    beta, *_ = np.linalg.lstsq(design, dep, rcond=None)
    resid = dep - design @ beta
    sigma2 = float(resid @ resid) / n_obs
    lag_sum_sq = float(cols[0] @ cols[0])
    return float(beta[0]), beta[1:], sigma2, lag_sum_sq


def ng_perron_mza(
    series: TimeSeries | np.ndarray,
    detrending: str = CONSTANT,
    max_lag: int | None = None,
) -> UnitRootResult:
    """MZa unit-root statistic on GLS-detrended data.

    Rejection (stationarity) is a left-tail event against the tabulated
    critical values.  The autoregression lag is selected by the modified AIC
    on a common sample up to ``max_lag`` (default: the usual T-based rule).
    Lag selection and the spectral-density autoregression run on
    OLS-detrended data while the statistic's sums use the GLS-detrended
    series; mixing the two avoids the known power collapse of the
    GLS-detrended criterion when the input is already strongly stationary.
    """
    y = series.values if isinstance(series, TimeSeries) else np.asarray(series, float)
    t = y.shape[0]
    if t < 30:
        raise LengthError(f"unit-root test needs at least 30 observations, got {t}")
    if max_lag is None:
        max_lag = int(np.floor(12.0 * (t / 100.0) ** 0.25))
    max_lag = min(max_lag, t // 2 - 4)

    detrended = _gls_detrend(y, detrending)
    selection_series = _ols_detrend(y, detrending)

    best_k, best_value = 0, np.inf
    for k in range(0, max_lag + 1):
        b0, _, sigma2, lag_sum_sq = _adf_regression(selection_series, k, max_lag)
        n_obs = selection_series.shape[0] - 1 - max_lag
        tau = (b0 * b0) * lag_sum_sq / sigma2
        value = np.log(sigma2) + 2.0 * (tau + k) / n_obs
        if value < best_value:
            best_value, best_k = value, k

    b0, diff_coeffs, sigma2_e, _ = _adf_regression(selection_series, best_k, best_k)
    s2_ar = sigma2_e / (1.0 - diff_coeffs.sum()) ** 2
    numerator = detrended[-1] ** 2 / t - s2_ar
    denominator = 2.0 * float(detrended[:-1] @ detrended[:-1]) / t**2
    mza = float(numerator / denominator)

    cvs = MZA_CRITICAL_VALUES[detrending]
    return UnitRootResult(
        statistic_mza=mza,
        lag_used=best_k,
        detrending=detrending,
        decision_at={level: mza < cv for level, cv in cvs.items()},
        critical_values=dict(cvs),
    )


def _moments(x: np.ndarray) -> tuple[float, float]:
    """Skewness and kurtosis from population central moments."""
    centered = x - x.mean()
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return m3 / m2**1.5, m4 / m2**2


def _skewness_z(root_b1: float, n: float) -> float:
    beta = 3.0 * (n**2 + 27 * n - 70) * (n + 1) * (n + 3)
    beta /= (n - 2) * (n + 5) * (n + 7) * (n + 9)
    w2 = -1.0 + np.sqrt(2.0 * (beta - 1.0))
    delta = 1.0 / np.sqrt(0.5 * np.log(w2))
    y = root_b1 * np.sqrt((w2 - 1.0) * (n + 1) * (n + 3) / (12.0 * (n - 2)))
    return float(delta * np.log(y + np.sqrt(y * y + 1.0)))


def _kurtosis_z(b1: float, b2: float, n: float) -> float:
    d = (n - 3) * (n + 1) * (n**2 + 15 * n - 4)
    a = (n - 2) * (n + 5) * (n + 7) * (n**2 + 27 * n - 70) / (6.0 * d)
    c = (n - 7) * (n + 5) * (n + 7) * (n**2 + 2 * n - 5) / (6.0 * d)
    k = (n + 5) * (n + 7) * (n**3 + 37 * n**2 + 11 * n - 313) / (12.0 * d)
    alpha = a + b1 * c
    chi = max((b2 - 1.0 - b1) * 2.0 * k, 0.0)
    return float(np.sqrt(9.0 * alpha) * (np.cbrt(chi / (2.0 * alpha)) - 1.0 + 1.0 / (9.0 * alpha)))


def doornik_hansen(residuals: np.ndarray) -> tuple[float, float]:
    """Omnibus multivariate normality statistic and its p-value.

    ``residuals`` is variables x observations.  The statistic sums squared
    normalized skewness and kurtosis transforms of the decorrelated
    components and is asymptotically chi-square with 2n degrees of freedom.
    """
    x = np.asarray(residuals, dtype=np.float64)
    n, t = x.shape
    if t <= n + 10:
        raise LengthError(f"need more than {n + 10} observations, got {t}")
    centered = x - x.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / (t - 1)
    sd = np.sqrt(np.diag(cov))
    if np.any(sd == 0.0):
        raise SingularityError("a residual series is constant")
    corr = cov / np.outer(sd, sd)
    eigvals, eigvecs = np.linalg.eigh(corr)
    if eigvals.min() < 1e-12:
        raise SingularityError("residual correlation matrix is singular")
    inv_sqrt = eigvecs @ np.diag(eigvals**-0.5) @ eigvecs.T
    standardized = inv_sqrt @ (centered / sd[:, np.newaxis])

    stat = 0.0
    for row in standardized:
        root_b1, b2 = _moments(row)
        stat += _skewness_z(root_b1, float(t)) ** 2
        stat += _kurtosis_z(root_b1**2, b2, float(t)) ** 2
    return float(stat), chi_square_upper_tail(float(stat), 2 * n)


def mv_arch_test(residuals: np.ndarray, q: int = 1) -> tuple[float, float]:
    """Multivariate LM test for ARCH effects of order ``q``.

    The unique elements of the residual outer products are regressed on an
    intercept and ``q`` of their own lags; the trace-form LM statistic is
    asymptotically chi-square with q * m^2 degrees of freedom, m being the
    number of unique outer-product elements.
    """
    x = np.asarray(residuals, dtype=np.float64)
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    n, t = x.shape
    rows, cols = np.tril_indices(n)
    products = x[rows] * x[cols]
    m = products.shape[0]

    aux = estimate_var(products, VarSpec(m, q))
    n_obs = aux.n_effective
    targets = products[:, q:]
    centered = targets - targets.mean(axis=1, keepdims=True)
    cov_restricted = centered @ centered.T / n_obs
    try:
        ratio = np.linalg.solve(cov_restricted, aux.residual_cov)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("outer-product covariance is singular") from exc
    stat = n_obs * (m - float(np.trace(ratio)))
    stat = max(stat, 0.0)
    return float(stat), chi_square_upper_tail(float(stat), q * m * m)


def var_residual_diagnostics(residuals: np.ndarray, q: int = 1) -> MvDiagnostics:
    """Bundle the two residual tests for one fitted VAR."""
    norm_stat, norm_p = doornik_hansen(residuals)
    arch_stat, arch_p = mv_arch_test(residuals, q)
    return MvDiagnostics(
        normality_stat=norm_stat,
        normality_p=norm_p,
        arch_stat=arch_stat,
        arch_p=arch_p,
        lag_order_tested=q,
    )
