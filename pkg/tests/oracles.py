"""Independent brute-force oracles the tests check the library against.

These deliberately use the most direct formulation available (explicit
normal equations, full projection matrices, high-precision special
functions) rather than sharing any code path with the package.
"""
from __future__ import annotations

import math

import numpy as np


def ols_normal_equations(targets: np.ndarray, design: np.ndarray) -> np.ndarray:
    """Coefficients from an explicit inverse of the Gram matrix.

    ``targets`` is equations x observations, ``design`` regressors x
    observations, mirroring the package layout.
    """
    gram = design @ design.T
    return targets @ design.T @ np.linalg.inv(gram)


def hat_diagonal(design: np.ndarray) -> np.ndarray:
    """Diagonal of the full projection matrix, formed explicitly."""
    gram_inv = np.linalg.inv(design @ design.T)
    return np.diag(design.T @ gram_inv @ design)


def chi2_upper_tail_mp(x: float, df: int) -> float:
    """Upper chi-square tail via mpmath's regularized incomplete gamma."""
    import mpmath

    mpmath.mp.dps = 40
    return float(mpmath.gammainc(df / 2.0, x / 2.0, mpmath.inf, regularized=True))


def sorted_rank_quantile(values, q: float) -> float:
    """Plain-Python full-sort order statistic with a 1-based ceil rank."""
    ordered = sorted(float(v) for v in values)
    rank = math.ceil(q * len(ordered) - 1e-9)
    return ordered[min(max(rank, 1), len(ordered)) - 1]


def squared_t_ratio(targets: np.ndarray, design: np.ndarray, equation: int, column: int) -> float:
    """Squared t-ratio of one coefficient with the ML variance convention."""
    gram_inv = np.linalg.inv(design @ design.T)
    coeffs = ols_normal_equations(targets, design)
    residuals = targets - coeffs @ design
    sigma2 = (residuals[equation] @ residuals[equation]) / residuals.shape[1]
    variance = gram_inv[column, column] * sigma2
    return float(coeffs[equation, column] ** 2 / variance)


def simulate_var1(coeffs: np.ndarray, intercept: np.ndarray, t: int, rng, burn: int = 200):
    """Direct VAR(1) simulation for recovery tests."""
    n = coeffs.shape[0]
    out = np.zeros((n, t + burn))
    for i in range(1, t + burn):
        out[:, i] = intercept + coeffs @ out[:, i - 1] + rng.standard_normal(n)
    return out[:, burn:]
