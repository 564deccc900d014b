"""Leveraged residual bootstrap for data-specific Wald critical values.

The null-imposed model is the augmented VAR with the cause's restricted-lag
coefficients forced to zero in the effect's equation only.  Its residuals,
inflated by 1/sqrt(1 - h_t) with h_t the hat-diagonal of the common design
and re-centered, are resampled as whole cross-sectional columns so the
contemporaneous correlation survives.  Each replication regenerates the
sample recursively from the null coefficients and the actual initial
observations, refits the unrestricted model and records its Wald statistic;
critical values are order-statistic quantiles of those statistics.

Replication r draws from an RNG stream derived only from (master seed, r),
and work is split into fixed-size chunks, so results are bit-identical for
any worker count or scheduling order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .causality import RestrictionSet, wald_test
from .errors import NumericalError, SingularityError
from .varmodel import VarFit, VarSpec, build_design, estimate_var

CHUNK_SIZE = 512
QUANTILE_LABELS = {0.99: "1%", 0.95: "5%", 0.90: "10%"}


@dataclass(frozen=True)
class BootstrapConfig:
    replications: int = 10000
    seed: int = 0
    quantiles: tuple[float, ...] = (0.99, 0.95, 0.90)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.replications < 100:
            raise ValueError("need at least 100 replications")
        if any(not 0.0 < q < 1.0 for q in self.quantiles):
            raise ValueError("quantiles must lie strictly inside (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class BootstrapResult:
    cvs: dict[str, float]
    effective_replications: int
    requested_replications: int
    warning: str | None = None
    replication_statistics: np.ndarray | None = None


def quantile_label(q: float) -> str:
    """Map a quantile like 0.95 to its significance label "5%"."""
    return QUANTILE_LABELS.get(q, f"{(1.0 - q) * 100.0:g}%")


def empirical_quantile(values: np.ndarray, q: float) -> float:
    """Order-statistic quantile: element ceil(q*N) of the sorted sample.

    The index is computed with a small slack so that exact products like
    0.95 * 100 do not round up through floating-point noise.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot take a quantile of an empty sample")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must be in (0, 1), got {q}")
    rank = math.ceil(q * values.size - 1e-9)
    rank = min(max(rank, 1), values.size)
    return float(np.sort(values)[rank - 1])


def estimate_null_model(
    data: np.ndarray, spec: VarSpec, restrictions: RestrictionSet
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fit the VAR with the non-causality null imposed.

    Every equation keeps the full augmented regressor set except the effect
    equation, which drops the cause's restricted lags; the dropped
    coefficients are reported as exact zeros.  Returns (coefficients,
    residuals, hat diagonal of the common design).
    """
    targets, design = build_design(data, spec)
    fit = estimate_var(data, spec)
    coeffs = fit.coefficients.copy()
    residuals = fit.residuals.copy()

    n = spec.n_vars
    positions = restrictions.positions
    drop_cols = np.unique(positions // n)
    effect = restrictions.effect_index
    keep = np.setdiff1d(np.arange(spec.n_regressors), drop_cols)
    reduced = design[keep, :]
    q, r = np.linalg.qr(reduced.T)
    diag = np.abs(np.diag(r))
    if diag.min() == 0.0 or diag.min() / diag.max() < 1e-12:
        raise SingularityError("null-imposed design is rank deficient")
    beta = np.linalg.solve(r, q.T @ targets[effect])
    coeffs[effect, :] = 0.0
    coeffs[effect, keep] = beta
    residuals[effect, :] = targets[effect] - beta @ reduced
    return coeffs, residuals, fit.leverages


def leverage_adjust(residuals: np.ndarray, hat: np.ndarray) -> np.ndarray:
    """Inflate residual columns by 1/sqrt(1 - h_t), then re-center each row.

    A single hat value per column keeps the adjustment a positive scalar on
    each cross-section, so the contemporaneous correlation pattern of the
    residuals is untouched by the inflation itself.
    """
    hat = np.asarray(hat, dtype=np.float64)
    if np.any(hat >= 1.0) or np.any(hat < 0.0):
        raise NumericalError("hat values outside [0, 1); cannot leverage-adjust")
    adjusted = residuals / np.sqrt(1.0 - hat)[np.newaxis, :]
    return adjusted - adjusted.mean(axis=1, keepdims=True)


def _regenerate_chunk(
    initial: np.ndarray,
    null_coeffs: np.ndarray,
    innovations: np.ndarray,
) -> np.ndarray:
    """Simulate m samples forward from shared initial conditions.

    ``innovations`` has shape (m, n, t_eff); the result has shape
    (m, n, p + t_eff) with the initial p columns copied from ``initial``.
    """
    m, n, t_eff = innovations.shape
    p = initial.shape[1]
    intercept = null_coeffs[:, 0]
    blocks = [null_coeffs[:, 1 + j * n : 1 + (j + 1) * n].T.copy() for j in range(p)]
    out = np.empty((m, n, p + t_eff))
    out[:, :, :p] = initial
    for t in range(p, p + t_eff):
        step = innovations[:, :, t - p] + intercept
        for j, block in enumerate(blocks):
            step += out[:, :, t - 1 - j] @ block
        out[:, :, t] = step
    return out


def _chunk_statistics(
    start: int,
    stop: int,
    seed: int,
    initial: np.ndarray,
    null_coeffs: np.ndarray,
    adjusted: np.ndarray,
    spec: VarSpec,
    restrictions: RestrictionSet,
) -> np.ndarray:
    """Wald statistics for replications [start, stop); NaN marks a failed refit."""
    t_eff = adjusted.shape[1]
    m = stop - start
    innovations = np.empty((m, spec.n_vars, t_eff))
    for i, rep in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))
        draws = rng.integers(0, t_eff, size=t_eff)
        innovations[i] = adjusted[:, draws]
    samples = _regenerate_chunk(initial, null_coeffs, innovations)
    stats = np.full(m, np.nan)
    for i in range(m):
        try:
            fit = estimate_var(samples[i], spec)
            stats[i] = wald_test(fit, restrictions).wald
        except (SingularityError, NumericalError, np.linalg.LinAlgError):
            pass
    return stats


def bootstrap_statistics(
    data: np.ndarray,
    spec: VarSpec,
    restrictions: RestrictionSet,
    config: BootstrapConfig,
) -> np.ndarray:
    """The raw replication Wald statistics (NaN where a refit failed)."""
    data = np.asarray(data, dtype=np.float64)
    null_coeffs, null_residuals, hat = estimate_null_model(data, spec, restrictions)
    adjusted = leverage_adjust(null_residuals, hat)
    initial = data[:, : spec.total_lags]

    bounds = list(range(0, config.replications, CHUNK_SIZE))
    chunks = [(s, min(s + CHUNK_SIZE, config.replications)) for s in bounds]
    args = [
        (s, e, config.seed, initial, null_coeffs, adjusted, spec, restrictions)
        for s, e in chunks
    ]
    if config.workers == 1 or len(chunks) == 1:
        parts = [_chunk_statistics(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_chunk_statistics, *zip(*args)))
    return np.concatenate(parts)


def bootstrap_cvs(
    data: np.ndarray,
    spec: VarSpec,
    restrictions: RestrictionSet,
    config: BootstrapConfig,
    keep_statistics: bool = False,
) -> BootstrapResult:
    """Bootstrap critical values for one causality direction.

    Failed replication refits are discarded and counted, never retried;
    losing more than 1% of them flags a warning on the result.
    """
    stats = bootstrap_statistics(data, spec, restrictions, config)
    good = stats[np.isfinite(stats)]
    if good.size == 0:
        raise NumericalError("every bootstrap replication failed to refit")
    cvs = {quantile_label(q): empirical_quantile(good, q) for q in config.quantiles}
    warning = None
    if good.size < 0.99 * config.replications:
        warning = (
            f"only {good.size} of {config.replications} replications "
            "produced a statistic"
        )
    return BootstrapResult(
        cvs=cvs,
        effective_replications=int(good.size),
        requested_replications=config.replications,
        warning=warning,
        replication_statistics=good if keep_statistics else None,
    )
