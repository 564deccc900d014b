"""Command-line interface for the study pipeline.

Configuration comes from an optional plain-text file of ``key = value``
lines (``#`` starts a comment; keys are dotted, see DEFAULTS below) with
command-line flags taking precedence over file values.  The cache directory
resolves flag > ASYMCAUSE_CACHE_DIR environment variable > config file >
default ``snapshot``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .bootstrap import BootstrapConfig
from .data_io import (
    DEFAULT_BASE_URL,
    FRED_REMOTE,
    LOCAL_CSV,
    SeriesSource,
    StudyWindow,
    fetch_fred,
)
from .errors import ConfigError, DataError, NumericalError
from .series import format_period
from .study import StageFailure, StudyConfig, render, run_study
from . import simulate as sim

DEFAULTS = {
    "y.kind": FRED_REMOTE,
    "y.identifier": "GDPC1",
    "y.date_column": "DATE",
    "y.value_column": "",
    "s.kind": FRED_REMOTE,
    "s.identifier": "SPASTT01USQ661N",
    "s.date_column": "DATE",
    "s.value_column": "",
    "window.start": "1960Q1",
    "window.end": "2020Q1",
    "lmax": "8",
    "augmentation": "1",
    "reps": "10000",
    "seed": "0",
    "jobs": "1",
    "format": "text",
    "snapshot_dir": "",
    "base_url": DEFAULT_BASE_URL,
    "refresh": "false",
    "arch_lags": "1",
}

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; unknown keys are configuration errors."""
    values: dict[str, str] = {}
    text = Path(path).read_text()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _to_int(values: dict[str, str], key: str) -> int:
    try:
        return int(values[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {values[key]!r}") from None


def _to_bool(values: dict[str, str], key: str) -> bool:
    text = values[key].lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {values[key]!r}")


def resolve_settings(
    config_path: str | None, overrides: dict[str, str | None]
) -> dict[str, str]:
    """Merge defaults, config file and flag overrides (flags win)."""
    values = dict(DEFAULTS)
    if config_path is not None:
        if not Path(config_path).exists():
            raise ConfigError(f"config file not found: {config_path}")
        values.update(parse_config_file(config_path))
    env_cache = os.environ.get("ASYMCAUSE_CACHE_DIR")
    if env_cache and not overrides.get("snapshot_dir"):
        values["snapshot_dir"] = env_cache
    for key, value in overrides.items():
        if value is not None and value != "":
            values[key] = str(value)
    if not values["snapshot_dir"]:
        values["snapshot_dir"] = "snapshot"
    return values


def build_study_config(settings: dict[str, str]) -> StudyConfig:
    def source(prefix: str) -> SeriesSource:
        kind = settings[f"{prefix}.kind"]
        if kind not in (FRED_REMOTE, LOCAL_CSV):
            raise ConfigError(f"{prefix}.kind must be fred_remote or local_csv")
        return SeriesSource(
            kind=kind,
            identifier=settings[f"{prefix}.identifier"],
            date_column=settings[f"{prefix}.date_column"] or "DATE",
            value_column=settings[f"{prefix}.value_column"] or None,
        )

    try:
        window = StudyWindow.parse(settings["window.start"], settings["window.end"])
    except DataError as exc:
        raise ConfigError(str(exc)) from exc
    fmt = settings["format"]
    if fmt not in ("text", "csv", "json"):
        raise ConfigError(f"format must be text, csv or json, got {fmt!r}")
    try:
        bootstrap = BootstrapConfig(
            replications=_to_int(settings, "reps"),
            seed=_to_int(settings, "seed"),
            workers=_to_int(settings, "jobs"),
        )
        return StudyConfig(
            source_y=source("y"),
            source_s=source("s"),
            window=window,
            l_max=_to_int(settings, "lmax"),
            augmentation=_to_int(settings, "augmentation"),
            bootstrap=bootstrap,
            arch_lags=_to_int(settings, "arch_lags"),
            cache_dir=settings["snapshot_dir"],
            base_url=settings["base_url"],
            refresh=_to_bool(settings, "refresh"),
        )
    except (ValueError, DataError) as exc:
        raise ConfigError(str(exc)) from exc


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, StageFailure):
        return _exit_code_for(exc.cause)
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, DataError):
        return EXIT_DATA
    return EXIT_NUMERICAL


def _run(fn) -> None:
    try:
        fn()
    except (ConfigError, DataError, NumericalError, StageFailure) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_code_for(exc))


def common_options(fn):
    fn = click.option("--config", "config_path", default=None, help="Config file path.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Master seed.")(fn)
    fn = click.option("--reps", type=int, default=None, help="Bootstrap replications.")(fn)
    fn = click.option("--lmax", type=int, default=None, help="Maximum lag order.")(fn)
    fn = click.option("--window", default=None, help="Period range, e.g. 1960Q1:2020Q1.")(fn)
    fn = click.option(
        "--format", "fmt", default=None, type=click.Choice(["text", "csv", "json"])
    )(fn)
    fn = click.option("--snapshot-dir", default=None, help="Cache/snapshot directory.")(fn)
    fn = click.option("--refresh", is_flag=True, default=False, help="Force re-download.")(fn)
    fn = click.option("--jobs", type=int, default=None, help="Parallel workers.")(fn)
    return fn


def _settings_from(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs):
    overrides: dict[str, str | None] = {
        "seed": seed,
        "reps": reps,
        "lmax": lmax,
        "format": fmt,
        "snapshot_dir": snapshot_dir,
        "jobs": jobs,
    }
    if window is not None:
        if ":" not in window:
            raise ConfigError("window must look like 1960Q1:2020Q1")
        start, end = window.split(":", 1)
        overrides["window.start"] = start
        overrides["window.end"] = end
    if refresh:
        overrides["refresh"] = "true"
    return resolve_settings(config_path, overrides)


@click.group()
def main() -> None:
    """Asymmetric causality study pipeline."""


@main.command()
@common_options
@click.option("--series", "series_codes", multiple=True, help="FRED codes to fetch.")
def fetch(series_codes, config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs):
    """Download and cache the study series."""

    def body():
        settings = _settings_from(
            config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs
        )
        config = build_study_config(settings)
        codes = list(series_codes) or [
            config.source_y.identifier,
            config.source_s.identifier,
        ]
        for code in codes:
            series = fetch_fred(
                code,
                window=config.window,
                cache_dir=config.cache_dir,
                base_url=config.base_url,
                refresh=config.refresh,
            )
            click.echo(
                f"{code}: {len(series)} observations "
                f"{format_period(series.start)}..{format_period(series.end)} "
                f"cached under {config.cache_dir}"
            )

    _run(body)


def _emit(report, fmt: str, out_dir: str) -> None:
    rendered = render(report, fmt)
    if fmt == "csv":
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in rendered.items():
            target = out / f"table_{name}.csv"
            target.write_text(text)
            click.echo(f"wrote {target}")
    else:
        click.echo(rendered, nl=False)


def _study_body(settings, out_dir, progress=False):
    config = build_study_config(settings)
    note = (lambda msg: click.echo(f"... {msg}", err=True)) if progress else None
    report = run_study(config, progress=note)
    _emit(report, settings["format"], out_dir)
    return report


@main.command()
@common_options
@click.option("--out", "out_dir", default=".", help="Directory for CSV output.")
@click.option("--progress", is_flag=True, default=False, help="Log stage progress.")
def study(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs, out_dir, progress):
    """Run the full pipeline and print all three tables."""
    _run(
        lambda: _study_body(
            _settings_from(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs),
            out_dir,
            progress,
        )
    )


def _partial_study(settings, keep: str) -> None:
    """Run the pipeline but render only one table (stages still run in order)."""
    config = build_study_config(settings)
    report = run_study(config)
    full = render(report, "text")
    sections = full.split("\n\n")
    picks = {"unit-root": 0, "diagnose": 1, "causality": 2}
    click.echo(sections[picks[keep]])


@main.command("unit-root")
@common_options
def unit_root(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs):
    """Unit-root tests on the six study series."""

    def body():
        settings = _settings_from(
            config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs
        )
        settings["reps"] = "100"  # causality stage not shown; keep it cheap
        _partial_study(settings, "unit-root")

    _run(body)


@main.command()
@common_options
def diagnose(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs):
    """Residual diagnostics for the three VARs."""

    def body():
        settings = _settings_from(
            config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs
        )
        settings["reps"] = "100"
        _partial_study(settings, "diagnose")

    _run(body)


@main.command()
@common_options
def causality(config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs):
    """The six causality tests with bootstrap critical values."""

    def body():
        settings = _settings_from(
            config_path, seed, reps, lmax, window, fmt, snapshot_dir, refresh, jobs
        )
        _partial_study(settings, "causality")

    _run(body)


@main.command()
@click.option(
    "--experiment",
    type=click.Choice(["wald-size", "bootstrap-size", "lag-selection"]),
    required=True,
)
@click.option("--reps", type=int, default=1000, help="Replications (outer loop).")
@click.option("--inner", type=int, default=400, help="Inner bootstrap replications.")
@click.option("--t", "t_obs", type=int, default=None, help="Sample length.")
@click.option("--lag", type=int, default=None, help="Model lag order.")
@click.option("--seed", type=int, default=0)
@click.option("--jobs", type=int, default=1)
def simulate(experiment, reps, inner, t_obs, lag, seed, jobs):
    """Monte Carlo size/power experiments."""

    def body():
        if experiment == "wald-size":
            r = sim.wald_size_experiment(
                reps, t=t_obs or 200, lag=lag or 2, seed=seed, workers=jobs
            )
            click.echo(f"asymptotic 5% rejection rate: {r.rate:.4f} ({reps} replications)")
        elif experiment == "bootstrap-size":
            r = sim.bootstrap_size_experiment(
                reps, inner=inner, t=t_obs or 100, lag=lag or 3, seed=seed, workers=jobs
            )
            click.echo(
                f"asymptotic 5% rejection: {r.asymptotic_rate:.4f}  "
                f"bootstrap 5% rejection: {r.bootstrap_rate:.4f} "
                f"({reps} outer x {inner} inner)"
            )
        else:
            r = sim.lag_selection_experiment(
                reps, t=t_obs or 200, l_max=lag or 5, seed=seed, workers=jobs
            )
            freqs = {l: round(r.frequency(l), 4) for l in range(1, len(r.counts))}
            click.echo(f"selection frequencies: {freqs}")

    _run(body)


if __name__ == "__main__":
    main()
