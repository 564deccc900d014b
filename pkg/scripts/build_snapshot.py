"""Build the archived data snapshot used by the replication tests.

Preferred path: download the two quarterly series (real GDP and the total
share price index) from FRED and cache them under snapshot/.  When the
network is unavailable -- the normal situation in the sandboxed build and CI
environments -- a deterministic simulated stand-in with the same window,
shapes and qualitative behaviour (integrated levels, heavy-tailed clustered
volatility, asymmetric cross-feeds, crash episodes) is generated instead and
clearly marked as synthetic in the snapshot metadata.

Run from the repository root:

    python scripts/build_snapshot.py [--dir snapshot] [--force-synthetic]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from asymcause.data_io import fetch_fred, write_cache_entry  # noqa: E402
from asymcause.errors import DataError  # noqa: E402

Y_CODE = "GDPC1"
S_CODE = "SPASTT01USQ661N"
WINDOW_START = "1960-01-01"
WINDOW_END = "2020-01-01"
N_QUARTERS = 241

SNAPSHOT_SEED = 20210103

# Crash quarters as offsets from 1960Q1 with log-return shocks; the tail
# events drive the heavy negative components the asymmetric tests feed on.
# Recession quarters (GDP growth shocks), loosely trailing the share-price
# crashes by a quarter or two so falling markets lead downturns.
RECESSION_EVENTS = (
    (59, -0.011),
    (60, -0.020),
    (61, -0.010),
    (80, -0.011),
    (81, -0.009),
    (86, -0.010),
    (87, -0.012),
    (88, -0.009),
    (123, -0.009),
    (196, -0.013),
    (197, -0.026),
    (198, -0.012),
    (240, -0.018),
)

CRASH_EVENTS = (
    (58, -0.18),
    (59, -0.08),
    (111, -0.19),
    (166, -0.14),
    (195, -0.20),
    (196, -0.09),
    (240, -0.17),
)

PARAMS = {
    "s_mean": 0.0125,
    "s_rho1": 0.08,
    "s_rho2": 0.20,
    "s_base_vol": 0.058,
    "s_garch_a": 0.15,
    "s_garch_b": 0.55,
    "s_tail_df": 5.0,
    "s_initial": 5.5,
    "y_mean": 0.0077,
    "y_rho1": 0.16,
    "y_rho2": 0.42,
    "y_neg_own": 0.25,
    "y_vol": 0.0050,
    "y_garch_a": 0.14,
    "y_garch_b": 0.60,
    "y_event_scale": 1.0,
    "y_initial": 3500.0,
    # GDP growth response to lagged share-price growth, split by sign
    "feed_pos_1": 0.010,
    "feed_pos_2": 0.008,
    "feed_neg_1": 0.018,
    "feed_neg_2": 0.004,
    "feed_sym_1": 0.0,
    "feed_sym_2": 0.0,
    "back_sym_1": 0.0,
    "back_neg_1": 0.0,
    # share-price growth response to lagged above-trend GDP growth
    "back_pos_1": 2.2,
    "back_pos_2": 1.5,
    "back_threshold": 0.004,
}


def generate_pair(params: dict, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Simulate (Y, S) level paths over the study window."""
    rng = np.random.default_rng(seed)
    t = N_QUARTERS
    df = params["s_tail_df"]
    shocks_s = rng.standard_t(df, size=t) / np.sqrt(df / (df - 2.0))
    shocks_y = rng.standard_normal(t)

    crash = np.zeros(t)
    for index, size in CRASH_EVENTS:
        crash[index] += size
    recession = np.zeros(t)
    for index, size in RECESSION_EVENTS:
        recession[index] += size * params["y_event_scale"]

    gs = np.zeros(t)
    gy = np.zeros(t)
    var_s = params["s_base_vol"] ** 2
    omega_s = var_s * (1.0 - params["s_garch_a"] - params["s_garch_b"])
    var_y = params["y_vol"] ** 2
    omega_y = var_y * (1.0 - params["y_garch_a"] - params["y_garch_b"])
    prev_innov = 0.0
    prev_innov_y = 0.0
    for i in range(1, t):
        var_s = omega_s + params["s_garch_a"] * prev_innov**2 + params["s_garch_b"] * var_s
        innov = np.sqrt(var_s) * shocks_s[i] + crash[i]
        prev_innov = innov
        var_y = omega_y + params["y_garch_a"] * prev_innov_y**2 + params["y_garch_b"] * var_y
        innov_y = np.sqrt(var_y) * shocks_y[i] + recession[i]
        prev_innov_y = innov_y

        pos1 = max(gs[i - 1], 0.0)
        neg1 = min(gs[i - 1], 0.0)
        pos2 = max(gs[i - 2], 0.0) if i >= 2 else 0.0
        neg2 = min(gs[i - 2], 0.0) if i >= 2 else 0.0
        gy_lag2 = gy[i - 2] if i >= 2 else params["y_mean"]
        gy[i] = (
            params["y_mean"] * (1.0 - params["y_rho1"] - params["y_rho2"])
            + params["y_rho1"] * gy[i - 1]
            + params["y_rho2"] * gy_lag2
            + params["y_neg_own"] * min(gy[i - 1] - 0.5 * params["y_mean"], 0.0)
            + params["feed_pos_1"] * pos1
            + params["feed_pos_2"] * pos2
            + params["feed_neg_1"] * neg1
            + params["feed_neg_2"] * neg2
            + params["feed_sym_1"] * (gs[i - 1] - params["s_mean"])
            + params["feed_sym_2"] * ((gs[i - 2] if i >= 2 else params["s_mean"]) - params["s_mean"])
            + innov_y
        )

        boom1 = max(gy[i - 1] - params["back_threshold"], 0.0)
        boom2 = max(gy_lag2 - params["back_threshold"], 0.0)
        gs_lag2 = gs[i - 2] if i >= 2 else 0.0
        gs[i] = (
            params["s_mean"] * (1.0 - params["s_rho1"] - params["s_rho2"])
            + params["s_rho1"] * gs[i - 1]
            + params["s_rho2"] * gs_lag2
            + params["back_pos_1"] * boom1
            + params["back_pos_2"] * boom2
            + params["back_sym_1"] * (gy[i - 1] - params["y_mean"])
            + params["back_neg_1"] * min(gy[i - 1], 0.0)
            - (params["back_pos_1"] + params["back_pos_2"])
            * max(params["y_mean"] - params["back_threshold"], 0.0)
            + innov
        )

    y_levels = params["y_initial"] * np.cumprod(np.concatenate([[1.0], 1.0 + gy[1:]]))
    s_levels = params["s_initial"] * np.cumprod(np.concatenate([[1.0], 1.0 + gs[1:]]))
    return y_levels, s_levels


def quarterly_dates() -> list[str]:
    dates = []
    year, quarter = 1960, 1
    for _ in range(N_QUARTERS):
        dates.append(f"{year}-{3 * (quarter - 1) + 1:02d}-01")
        quarter += 1
        if quarter == 5:
            year, quarter = year + 1, 1
    return dates


def to_fred_csv(code: str, values: np.ndarray) -> bytes:
    lines = [f"DATE,{code}"]
    for date, value in zip(quarterly_dates(), values):
        lines.append(f"{date},{value:.4f}")
    return ("\n".join(lines) + "\n").encode()


def write_synthetic(directory: Path, seed: int = SNAPSHOT_SEED) -> None:
    y_levels, s_levels = generate_pair(PARAMS, seed)
    stamp = "1970-01-01T00:00:00+00:00"
    for code, values in ((Y_CODE, y_levels), (S_CODE, s_levels)):
        write_cache_entry(
            directory,
            code,
            to_fred_csv(code, values),
            url=f"synthetic://asymcause/{code}?seed={seed}",
            retrieved_at=stamp,
        )
    print(f"wrote synthetic snapshot (seed {seed}) to {directory}/")
    print("note: generated stand-in data; re-run with network access for real FRED data")


def try_live(directory: Path) -> bool:
    try:
        for code in (Y_CODE, S_CODE):
            series = fetch_fred(code, cache_dir=directory, refresh=True)
            print(f"fetched {code}: {len(series)} observations")
        return True
    except DataError as exc:
        print(f"live fetch unavailable ({exc})")
        return False


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default=str(REPO_ROOT / "snapshot"))
    parser.add_argument("--force-synthetic", action="store_true")
    parser.add_argument("--seed", type=int, default=SNAPSHOT_SEED)
    args = parser.parse_args()
    directory = Path(args.dir)
    if not args.force_synthetic and try_live(directory):
        return
    write_synthetic(directory, args.seed)


if __name__ == "__main__":
    main()
