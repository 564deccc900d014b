"""VAR estimation, lag-order selection and leverage values.

Models are estimated equation by equation with ordinary least squares; with
identical regressors across equations this coincides with multivariate OLS.
The design is factored by QR rather than solving the normal equations
directly, which matters for the strongly trending cumulative-component
regressors this package feeds in.  The residual covariance uses the
maximum-likelihood divisor (the effective sample size), consistent with the
information criterion used for lag selection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DeterminantError, LengthError, SingularityError

RCOND_MIN = 1e-12


@dataclass(frozen=True)
class VarSpec:
    """Shape of a VAR: variable count, restricted lags and augmentation lags.

    ``lag_order`` is the dynamically modelled order; ``extra_lags`` are
    unrestricted augmentation lags appended for testing with integrated data
    and never enter the lag-selection penalty or any restriction.
    """

    n_vars: int
    lag_order: int
    extra_lags: int = 0
    include_intercept: bool = True

    def __post_init__(self) -> None:
        if self.n_vars < 1:
            raise ValueError(f"n_vars must be >= 1, got {self.n_vars}")
        if self.lag_order < 1:
            raise ValueError(f"lag_order must be >= 1, got {self.lag_order}")
        if self.extra_lags < 0:
            raise ValueError(f"extra_lags must be >= 0, got {self.extra_lags}")

    @property
    def total_lags(self) -> int:
        return self.lag_order + self.extra_lags

    @property
    def n_regressors(self) -> int:
        """Regressors per equation: intercept plus all lag blocks."""
        return int(self.include_intercept) + self.n_vars * self.total_lags

    def min_sample(self) -> int:
        """Smallest total T acceptable: T_eff >= regressors per equation + 2."""
        return self.total_lags + self.n_regressors + 2


@dataclass(frozen=True)
class VarFit:
    """An estimated VAR in compact form.

    ``coefficients`` has one row per equation and columns ordered
    [intercept, lag-1 block, ..., lag-(l+d) block]; ``design`` stacks the
    matching regressor vectors as columns, one per effective observation.
    ``gram_inverse`` is the inverse of design @ design.T, kept because the
    Wald test and the bootstrap reuse it heavily.
    """

    spec: VarSpec
    coefficients: np.ndarray
    residuals: np.ndarray
    design: np.ndarray
    residual_cov: np.ndarray
    leverages: np.ndarray
    gram_inverse: np.ndarray

    @property
    def n_effective(self) -> int:
        return self.residuals.shape[1]


def build_design(data: np.ndarray, spec: VarSpec) -> tuple[np.ndarray, np.ndarray]:
    """Lay out targets W (n x T_eff) and regressors X (k x T_eff).

    Column t of X is [1, z_{t-1}', ..., z_{t-p}']' for the t-th effective
    observation, matching the coefficient column order.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be an n x T matrix")
    n, total = data.shape
    if n != spec.n_vars:
        raise ValueError(f"data has {n} rows but spec expects {spec.n_vars}")
    if not np.isfinite(data).all():
        raise ValueError("data contains NaN or inf")
    p = spec.total_lags
    if total < spec.min_sample():
        raise LengthError(
            f"need at least {spec.min_sample()} observations for "
            f"{spec.n_vars} variables with {p} lags, got {total}"
        )
    t_eff = total - p
    targets = data[:, p:]
    rows: list[np.ndarray] = []
    if spec.include_intercept:
        rows.append(np.ones((1, t_eff)))
    for lag in range(1, p + 1):
        rows.append(data[:, p - lag : total - lag])
    design = np.vstack(rows)
    return targets, design


def _qr_solve(design: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Least squares of targets' rows on design's rows via economy QR.

    Returns (coefficients, hat diagonal, inverse Gram matrix) and raises on
    rank deficiency.
    """
    q, r = np.linalg.qr(design.T)
    diag = np.abs(np.diag(r))
    if diag.min() == 0.0 or diag.min() / diag.max() < RCOND_MIN:
        raise SingularityError(
            "design matrix is rank deficient "
            f"(reciprocal condition below {RCOND_MIN:g})"
        )
    coeffs = np.linalg.solve(r, q.T @ targets.T).T
    hat = np.einsum("ij,ij->i", q, q)
    r_inv = np.linalg.solve(r, np.eye(r.shape[0]))
    gram_inverse = r_inv @ r_inv.T
    return coeffs, hat, gram_inverse


def estimate_var(data: np.ndarray, spec: VarSpec) -> VarFit:
    """Fit a VAR by least squares.

    Parameters
    ----------
    data : ndarray, shape (n_vars, T)
        Variables in rows, time in columns, oldest first.
    spec : VarSpec

    Returns
    -------
    VarFit
        Coefficients, residuals, design, ML residual covariance and the
        hat-matrix diagonal of the common design.
    """
    targets, design = build_design(data, spec)
    coeffs, hat, gram_inverse = _qr_solve(design, targets)
    residuals = targets - coeffs @ design
    t_eff = residuals.shape[1]
    cov = (residuals @ residuals.T) / t_eff
    cov = (cov + cov.T) / 2.0
    return VarFit(
        spec=spec,
        coefficients=coeffs,
        residuals=residuals,
        design=design,
        residual_cov=cov,
        leverages=hat,
        gram_inverse=gram_inverse,
    )


def leverages(design: np.ndarray) -> np.ndarray:
    """Hat-matrix diagonal of a design given as regressors x observations."""
    design = np.asarray(design, dtype=np.float64)
    if design.ndim == 1:
        design = design[np.newaxis, :]
    q, r = np.linalg.qr(design.T)
    diag = np.abs(np.diag(r))
    if diag.min() == 0.0 or diag.min() / diag.max() < RCOND_MIN:
        raise SingularityError("design matrix is rank deficient")
    return np.einsum("ij,ij->i", q, q)


def hjc(fit: VarFit, sample_size: int) -> float:
    """Lag-selection criterion combining Bayesian and Hannan-Quinn penalties.

    ``sample_size`` must be held fixed while comparing candidate lag orders.
    Only the restricted lag order enters the penalty; augmentation lags are
    appended after selection and are not penalized.
    """
    if sample_size < 3:
        raise ValueError("sample_size must be at least 3")
    sign, logdet = np.linalg.slogdet(fit.residual_cov)
    if sign <= 0:
        raise DeterminantError("residual covariance has non-positive determinant")
    lag = fit.spec.lag_order
    v2 = float(fit.spec.n_vars) ** 2
    t = float(sample_size)
    penalty = lag * (v2 * np.log(t) + 2.0 * v2 * np.log(np.log(t))) / (2.0 * t)
    return float(logdet + penalty)


def select_lag(
    data: np.ndarray,
    l_max: int,
    extra_lags: int = 0,
    include_intercept: bool = True,
) -> int:
    """Pick the lag order minimizing the criterion over l = 1..l_max.

    All candidates are estimated on a common effective sample, trimmed as if
    l_max restricted lags plus the augmentation lags were in use, so the
    criterion values are comparable.  Ties go to the smaller lag.  Selection
    runs on the unaugmented model; augmentation lags only shape the trim.
    """
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    data = np.asarray(data, dtype=np.float64)
    n, total = data.shape
    common_eff = total - l_max - extra_lags
    best_lag = 0
    best_value = np.inf
    for lag in range(1, l_max + 1):
        offset = (l_max + extra_lags) - lag
        spec = VarSpec(n, lag, 0, include_intercept)
        try:
            fit = estimate_var(data[:, offset:], spec)
            value = hjc(fit, common_eff)
        except Exception as exc:
            raise type(exc)(f"lag {lag}: {exc}") from exc
        if value < best_value:
            best_value = value
            best_lag = lag
    return best_lag
