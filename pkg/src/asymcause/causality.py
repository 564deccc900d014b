"""Zero-restriction matrices and the Wald test for Granger non-causality.

The null "variable `cause` does not cause variable `effect`" sets the
coefficients of the cause's first ``lag_order`` lags in the effect's
equation to zero.  Augmentation lags stay unrestricted, so with integrated
variables the statistic keeps its chi-square limit.  All vectorization is
column-major over the coefficient matrix, and the restriction matrix must be
built against that same ordering; a scalar-case self test in the suite pins
the two together by checking a single restriction equals the squared t-ratio.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import gammaincc

from .errors import NumericalError
from .varmodel import VarFit, VarSpec


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(matrix).ravel(order="F")


def unvec(stacked: np.ndarray, n_rows: int) -> np.ndarray:
    """Inverse of :func:`vec` for a known row count."""
    stacked = np.asarray(stacked)
    return stacked.reshape((n_rows, stacked.size // n_rows), order="F")


def coef_position(spec: VarSpec, variable: int, lag: int, equation: int) -> int:
    """0-based position of one coefficient in the vectorized coefficient matrix.

    ``variable`` and ``equation`` are 0-based; ``lag`` counts from 1.  The
    coefficient sits in column ``intercept + (lag-1)*n + variable`` of the
    coefficient matrix, hence at ``column * n + equation`` after column
    stacking.
    """
    if not 0 <= variable < spec.n_vars:
        raise ValueError(f"variable index {variable} out of range")
    if not 0 <= equation < spec.n_vars:
        raise ValueError(f"equation index {equation} out of range")
    if not 1 <= lag <= spec.total_lags:
        raise ValueError(f"lag {lag} out of range 1..{spec.total_lags}")
    column = int(spec.include_intercept) + (lag - 1) * spec.n_vars + variable
    return column * spec.n_vars + equation


@dataclass(frozen=True)
class RestrictionSet:
    """Selector for the coefficients zeroed under non-causality.

    ``matrix`` has one row per restricted lag with a single 1 picking the
    cause's lag-j coefficient in the effect's equation; augmentation lags
    are never touched.
    """

    cause_index: int
    effect_index: int
    lag_count: int
    matrix: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        """Vectorized-coefficient positions selected by each row."""
        return self.matrix.argmax(axis=1)


def build_restrictions(spec: VarSpec, cause: int, effect: int) -> RestrictionSet:
    """Restriction matrix for "cause does not Granger-cause effect".

    ``cause`` and ``effect`` are 0-based positions in the VAR ordering.
    """
    if cause == effect:
        raise ValueError("cause and effect must be different variables")
    n_alpha = spec.n_vars * spec.n_regressors
    matrix = np.zeros((spec.lag_order, n_alpha))
    for j in range(1, spec.lag_order + 1):
        matrix[j - 1, coef_position(spec, cause, j, effect)] = 1.0
    return RestrictionSet(
        cause_index=cause, effect_index=effect, lag_count=spec.lag_order, matrix=matrix
    )


@dataclass
class CausalityResult:
    """Outcome of one non-causality test.

    ``bootstrap_cvs`` stays None until the bootstrap has run; the causal
    parameter is the sum of the restricted coefficient estimates (reported
    as such -- the scalar is a summary, not a structural quantity).
    """

    wald: float
    df: int
    asymptotic_p: float
    causal_parameter: float
    lag_order: int
    augmentation: int
    direction_label: str
    bootstrap_cvs: dict[str, float] | None = None
    restricted_coefficients: np.ndarray = field(default_factory=lambda: np.empty(0))


def chi_square_upper_tail(x: float, df: int) -> float:
    """Upper-tail probability of a chi-square variate.

    Computed as the regularized upper incomplete gamma function
    Q(df/2, x/2); monotone decreasing in ``x``.
    """
    if df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    return float(gammaincc(df / 2.0, x / 2.0))


def wald_test(
    fit: VarFit,
    restrictions: RestrictionSet,
    direction_label: str = "",
) -> CausalityResult:
    """Wald statistic for the zero restrictions on an estimated VAR.

    The covariance of the stacked coefficients is the Kronecker product of
    the inverse design Gram matrix and the unrestricted residual covariance;
    since each restriction picks a single coefficient, only the implied
    ``l x l`` block is ever formed.  The p-value uses the chi-square law
    with one degree of freedom per restricted lag.
    """
    n = fit.spec.n_vars
    positions = restrictions.positions
    cols = positions // n
    rows = positions % n
    theta = fit.coefficients[rows, cols]
    bracket = fit.gram_inverse[np.ix_(cols, cols)] * fit.residual_cov[np.ix_(rows, rows)]
    try:
        factor = cho_factor(bracket, lower=True)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(bracket)
        raise NumericalError(
            f"restricted covariance block not positive definite (cond={cond:.3e})"
        ) from exc
    wald = float(theta @ cho_solve(factor, theta))
    wald = max(wald, 0.0)
    df = restrictions.lag_count
    return CausalityResult(
        wald=wald,
        df=df,
        asymptotic_p=chi_square_upper_tail(wald, df),
        causal_parameter=float(theta.sum()),
        lag_order=fit.spec.lag_order,
        augmentation=fit.spec.extra_lags,
        direction_label=direction_label,
        restricted_coefficients=theta.copy(),
    )
