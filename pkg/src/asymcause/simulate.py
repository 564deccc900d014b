"""Monte Carlo harness for size and power experiments.

Used by the `simulate` CLI subcommand and by the acceptance suite to check
that the asymptotic Wald test holds its size under a Gaussian null, that the
leveraged bootstrap controls size under heavy-tailed conditionally
heteroskedastic innovations where the asymptotic test does not, and that the
lag-selection criterion recovers a known order.  Replication r of any
experiment draws from an RNG stream derived only from (seed, r), with work
split into fixed-size chunks, so results do not depend on worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .bootstrap import BootstrapConfig, bootstrap_cvs
from .causality import build_restrictions, wald_test
from .errors import NumericalError, SingularityError
from .varmodel import VarSpec, estimate_var, select_lag

EXPERIMENT_CHUNK = 64

NULL_DIAG_AR = ((0.5, 0.2, 0.15), (0.3, 0.15, 0.1))

VAR2_COEFFS = (
    np.array([[0.4, 0.1], [0.1, 0.4]]),
    np.array([[0.25, -0.1], [-0.1, 0.25]]),
)


def _rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def simulate_var(
    blocks: tuple[np.ndarray, ...],
    t: int,
    rng: np.random.Generator,
    innovations: str = "gaussian",
    burn: int = 100,
) -> np.ndarray:
    """Draw one sample path from a bivariate VAR with unit intercepts.

    ``innovations`` is either ``"gaussian"`` or ``"t-garch"``: unit-variance
    Student-t(5) shocks scaled by a GARCH(1,1) recursion, the hostile case
    used in the bootstrap size experiment.
    """
    n = blocks[0].shape[0]
    p = len(blocks)
    total = t + burn
    if innovations == "gaussian":
        shocks = rng.standard_normal((n, total))
    elif innovations == "t-garch":
        raw = rng.standard_t(5, size=(n, total)) / np.sqrt(5.0 / 3.0)
        shocks = np.empty((n, total))
        variance = np.full(n, 1.0)
        prev = np.zeros(n)
        for i in range(total):
            variance = 0.05 + 0.35 * prev**2 + 0.6 * variance
            shocks[:, i] = np.sqrt(variance) * raw[:, i]
            prev = shocks[:, i]
    else:
        raise ValueError(f"unknown innovation scheme {innovations!r}")
    out = np.zeros((n, total))
    for i in range(p, total):
        acc = shocks[:, i].copy()
        for j, block in enumerate(blocks):
            acc += block @ out[:, i - 1 - j]
        out[:, i] = acc
    return out[:, burn:]


def _null_blocks(lag: int) -> tuple[np.ndarray, ...]:
    """Diagonal (non-causal) AR blocks truncated to ``lag`` matrices."""
    return tuple(
        np.diag([NULL_DIAG_AR[0][j], NULL_DIAG_AR[1][j]]) for j in range(lag)
    )


@dataclass
class SizeResult:
    replications: int
    rejections: int

    @property
    def rate(self) -> float:
        return self.rejections / self.replications


def _parallel_chunks(fn, replications: int, workers: int, *args) -> list:
    bounds = [
        (s, min(s + EXPERIMENT_CHUNK, replications))
        for s in range(0, replications, EXPERIMENT_CHUNK)
    ]
    tasks = [(s, e, *args) for s, e in bounds]
    if workers == 1 or len(tasks) == 1:
        return [fn(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def _wald_size_chunk(start: int, stop: int, seed: int, t: int, lag: int, extra: int) -> int:
    blocks = _null_blocks(lag)
    spec = VarSpec(2, lag, extra)
    threshold = chi2.ppf(0.95, lag)
    rejections = 0
    for rep in range(start, stop):
        data = simulate_var(blocks, t, _rep_rng(seed, rep))
        fit = estimate_var(data, spec)
        result = wald_test(fit, build_restrictions(spec, 1, 0))
        rejections += result.wald > threshold
    return rejections


def wald_size_experiment(
    replications: int,
    t: int = 200,
    lag: int = 2,
    extra: int = 1,
    seed: int = 0,
    workers: int = 1,
) -> SizeResult:
    """Rejection rate of the asymptotic 5% Wald test under a true null."""
    parts = _parallel_chunks(_wald_size_chunk, replications, workers, seed, t, lag, extra)
    return SizeResult(replications, int(sum(parts)))


def _bootstrap_size_chunk(
    start: int,
    stop: int,
    seed: int,
    t: int,
    lag: int,
    extra: int,
    inner: int,
) -> tuple[int, int]:
    blocks = _null_blocks(lag)
    spec = VarSpec(2, lag, extra)
    threshold = chi2.ppf(0.95, lag)
    asymptotic = bootstrap = 0
    for rep in range(start, stop):
        rng = _rep_rng(seed, rep)
        data = simulate_var(blocks, t, rng, innovations="t-garch")
        fit = estimate_var(data, spec)
        restrictions = build_restrictions(spec, 1, 0)
        wald = wald_test(fit, restrictions).wald
        asymptotic += wald > threshold
        inner_seed = int(rng.integers(0, 2**63 - 1))
        cvs = bootstrap_cvs(
            data,
            spec,
            restrictions,
            BootstrapConfig(replications=inner, seed=inner_seed, workers=1),
        ).cvs
        bootstrap += wald > cvs["5%"]
    return asymptotic, bootstrap


@dataclass
class BootstrapSizeResult:
    replications: int
    asymptotic_rejections: int
    bootstrap_rejections: int

    @property
    def asymptotic_rate(self) -> float:
        return self.asymptotic_rejections / self.replications

    @property
    def bootstrap_rate(self) -> float:
        return self.bootstrap_rejections / self.replications


def bootstrap_size_experiment(
    outer: int,
    inner: int = 400,
    t: int = 100,
    lag: int = 3,
    extra: int = 1,
    seed: int = 0,
    workers: int = 1,
) -> BootstrapSizeResult:
    """Compare asymptotic and bootstrap 5% rejection under hostile innovations."""
    parts = _parallel_chunks(
        _bootstrap_size_chunk, outer, workers, seed, t, lag, extra, inner
    )
    asym = sum(p[0] for p in parts)
    boot = sum(p[1] for p in parts)
    return BootstrapSizeResult(outer, int(asym), int(boot))


def _lag_selection_chunk(
    start: int, stop: int, seed: int, t: int, l_max: int, true_lag: int, white_noise: bool
) -> np.ndarray:
    counts = np.zeros(l_max + 1, dtype=np.int64)
    for rep in range(start, stop):
        rng = _rep_rng(seed, rep)
        if white_noise:
            data = rng.standard_normal((2, t))
        else:
            data = simulate_var(VAR2_COEFFS[:true_lag], t, rng)
        counts[select_lag(data, l_max)] += 1
    return counts


@dataclass
class LagSelectionResult:
    replications: int
    counts: np.ndarray

    def frequency(self, lag: int) -> float:
        return float(self.counts[lag]) / self.replications


def lag_selection_experiment(
    replications: int,
    t: int = 200,
    l_max: int = 5,
    true_lag: int = 2,
    seed: int = 0,
    workers: int = 1,
    white_noise: bool = False,
) -> LagSelectionResult:
    """How often the criterion picks each lag for a known data process."""
    parts = _parallel_chunks(
        _lag_selection_chunk, replications, workers, seed, t, l_max, true_lag, white_noise
    )
    return LagSelectionResult(replications, np.sum(parts, axis=0))
