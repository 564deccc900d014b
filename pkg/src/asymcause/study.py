"""Full study pipeline: ingest, decompose, diagnose, test, report.

One call runs the whole empirical design for a bivariate study: unit-root
tests on the two level series and their four components, lag selection for
the level/positive/negative VARs, residual diagnostics per VAR, and the six
causality directions with leveraged-bootstrap critical values.  Every random
quantity derives from the single master seed, so a report is reproducible
byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, bootstrap_cvs
from .causality import CausalityResult, build_restrictions, wald_test
from .data_io import (
    DEFAULT_BASE_URL,
    SeriesSource,
    StudyWindow,
    align,
    load_source,
    read_cache_meta,
)
from .decompose import decompose
from .diagnostics import (
    CONSTANT,
    MvDiagnostics,
    UnitRootResult,
    ng_perron_mza,
    var_residual_diagnostics,
)
from .errors import ConfigError
from .series import TimeSeries
from .varmodel import VarSpec, estimate_var, select_lag

VAR_LABELS = ("levels", "positive", "negative")


@dataclass(frozen=True)
class StudyConfig:
    """Everything a study run needs; exactly two variables, Y and S."""

    source_y: SeriesSource
    source_s: SeriesSource
    window: StudyWindow
    l_max: int = 8
    augmentation: int = 1
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    arch_lags: int = 1
    detrending: str = CONSTANT
    cache_dir: str = "snapshot"
    base_url: str = DEFAULT_BASE_URL
    refresh: bool = False

    def __post_init__(self) -> None:
        if self.l_max < 1:
            raise ConfigError(f"l_max must be >= 1, got {self.l_max}")
        if self.augmentation < 0:
            raise ConfigError(f"augmentation must be >= 0, got {self.augmentation}")


@dataclass
class UnitRootRow:
    series_id: str
    level: UnitRootResult
    difference: UnitRootResult


@dataclass
class DiagnosticsRow:
    var_label: str
    pair_label: str
    lag_order: int
    tests: MvDiagnostics


@dataclass
class CausalityRow:
    var_label: str
    result: CausalityResult

    @property
    def stars(self) -> str:
        return significance_stars(self.result.wald, self.result.bootstrap_cvs or {})


@dataclass
class StudyReport:
    unit_root_table: list[UnitRootRow]
    diagnostics_table: list[DiagnosticsRow]
    causality_table: list[CausalityRow]
    provenance: dict


def significance_stars(test_value: float, cvs: dict[str, float]) -> str:
    """Star markers against a 1%/5%/10% critical-value triple."""
    if not cvs:
        return ""
    if test_value >= cvs["1%"]:
        return "***"
    if test_value >= cvs["5%"]:
        return "**"
    if test_value >= cvs["10%"]:
        return "*"
    return ""


class StageFailure(Exception):
    """A pipeline stage failed; carries the stage name and original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _direction_seed(master: int, index: int) -> int:
    seq = np.random.SeedSequence(master, spawn_key=(index,))
    return int(seq.generate_state(1, np.uint64)[0])


def run_study(config: StudyConfig, progress=None) -> StudyReport:
    """Execute the full pipeline and assemble a report.

    Any stage failure aborts with the stage named; nothing partial is ever
    returned.  ``progress`` may be a callable taking a status string.
    """

    def note(message: str) -> None:
        if progress is not None:
            progress(message)

    def stage(name: str, fn):
        try:
            return fn()
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(name, exc) from exc

    def load_pair() -> tuple[TimeSeries, TimeSeries]:
        common = dict(
            window=config.window,
            cache_dir=config.cache_dir,
            base_url=config.base_url,
            refresh=config.refresh,
        )
        raw_y = load_source(config.source_y, **common)
        raw_s = load_source(config.source_s, **common)
        return raw_y.with_values(raw_y.values, "Y"), raw_s.with_values(raw_s.values, "S")

    note("loading series")
    y_series, s_series = stage("load", load_pair)

    note("decomposing")
    pair_y, pair_s = stage("decompose", lambda: (decompose(y_series), decompose(s_series)))

    six = [
        y_series,
        pair_y.positive,
        pair_y.negative,
        s_series,
        pair_s.positive,
        pair_s.negative,
    ]

    note("unit-root tests")
    unit_root_table = stage(
        "unit-root",
        lambda: [
            UnitRootRow(
                series_id=series.id,
                level=ng_perron_mza(series, config.detrending),
                difference=ng_perron_mza(series.difference(), config.detrending),
            )
            for series in six
        ],
    )

    datasets = {
        "levels": ([y_series, s_series], ("Y", "S")),
        "positive": ([pair_y.positive, pair_s.positive], ("Y+", "S+")),
        "negative": ([pair_y.negative, pair_s.negative], ("Y-", "S-")),
    }

    note("lag selection")

    def select_all() -> dict[str, tuple[np.ndarray, int]]:
        chosen = {}
        for label, (series_list, _) in datasets.items():
            matrix = align(series_list, config.window)
            lag = select_lag(matrix, config.l_max, config.augmentation)
            chosen[label] = (matrix, lag)
        return chosen

    selected = stage("lag-selection", select_all)

    note("residual diagnostics")

    def diagnose_all() -> list[DiagnosticsRow]:
        rows = []
        for label, (names) in ((k, datasets[k][1]) for k in VAR_LABELS):
            matrix, lag = selected[label]
            fit = estimate_var(matrix, VarSpec(2, lag))
            rows.append(
                DiagnosticsRow(
                    var_label=label,
                    pair_label=f"({names[0]}, {names[1]})",
                    lag_order=lag,
                    tests=var_residual_diagnostics(fit.residuals, config.arch_lags),
                )
            )
        return rows

    diagnostics_table = stage("diagnostics", diagnose_all)

    directions = []
    for label in VAR_LABELS:
        names = datasets[label][1]
        directions.append((label, 1, 0, f"{names[1]} =/> {names[0]}"))
    for label in VAR_LABELS:
        names = datasets[label][1]
        directions.append((label, 0, 1, f"{names[0]} =/> {names[1]}"))

    def test_direction(index: int, label: str, cause: int, effect: int, text: str) -> CausalityRow:
        matrix, lag = selected[label]
        spec = VarSpec(2, lag, config.augmentation)
        fit = estimate_var(matrix, spec)
        restrictions = build_restrictions(spec, cause, effect)
        result = wald_test(fit, restrictions, text)
        boot_config = BootstrapConfig(
            replications=config.bootstrap.replications,
            seed=_direction_seed(config.bootstrap.seed, index),
            quantiles=config.bootstrap.quantiles,
            workers=config.bootstrap.workers,
        )
        boot = bootstrap_cvs(matrix, spec, restrictions, boot_config)
        result.bootstrap_cvs = boot.cvs
        return CausalityRow(var_label=label, result=result)

    causality_table = []
    for index, (label, cause, effect, text) in enumerate(directions):
        note(f"causality {text}")
        causality_table.append(
            stage(
                f"causality[{text}]",
                lambda i=index, lb=label, c=cause, e=effect, tx=text: test_direction(i, lb, c, e, tx),
            )
        )

    def provenance() -> dict:
        snapshots = {}
        for source in (config.source_y, config.source_s):
            meta = read_cache_meta(config.cache_dir, source.identifier)
            if meta is not None:
                snapshots[source.identifier] = meta
        return {
            "package_version": __version__,
            "master_seed": config.bootstrap.seed,
            "bootstrap_replications": config.bootstrap.replications,
            "window": config.window.label(),
            "l_max": config.l_max,
            "augmentation": config.augmentation,
            "snapshots": snapshots,
        }

    return StudyReport(
        unit_root_table=unit_root_table,
        diagnostics_table=diagnostics_table,
        causality_table=causality_table,
        provenance=stage("assemble", provenance),
    )


def report_to_dict(report: StudyReport) -> dict:
    """Plain-data view of a report, stable enough to serialize."""
    return {
        "unit_root": [
            {
                "series": row.series_id,
                "statistic_level": row.level.statistic_mza,
                "statistic_difference": row.difference.statistic_mza,
                "lag_level": row.level.lag_used,
                "lag_difference": row.difference.lag_used,
                "reject_level_5pct": row.level.rejects("5%"),
                "reject_difference_10pct": row.difference.rejects("10%"),
                "critical_values": row.level.critical_values,
            }
            for row in report.unit_root_table
        ],
        "diagnostics": [
            {
                "var": row.pair_label,
                "lag_order": row.lag_order,
                "normality_stat": row.tests.normality_stat,
                "normality_p": row.tests.normality_p,
                "arch_stat": row.tests.arch_stat,
                "arch_p": row.tests.arch_p,
                "arch_lag": row.tests.lag_order_tested,
            }
            for row in report.diagnostics_table
        ],
        "causality": [
            {
                "null_hypothesis": row.result.direction_label,
                "test_value": row.result.wald,
                "cv_1pct": (row.result.bootstrap_cvs or {}).get("1%"),
                "cv_5pct": (row.result.bootstrap_cvs or {}).get("5%"),
                "cv_10pct": (row.result.bootstrap_cvs or {}).get("10%"),
                "asymptotic_p": row.result.asymptotic_p,
                "causal_parameter": row.result.causal_parameter,
                "lag_order": row.result.lag_order,
                "augmentation": row.result.augmentation,
                "significance": row.stars,
            }
            for row in report.causality_table
        ],
        "provenance": report.provenance,
    }


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render(report: StudyReport, fmt: str):
    """Render a report: aligned text, per-table CSV strings, or one JSON doc."""
    data = report_to_dict(report)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        tables = {}
        tables["unit_root"] = _csv_text(
            ["series", "statistic_level", "statistic_difference", "lag_level", "lag_difference"],
            [
                [r["series"], f"{r['statistic_level']:.5f}", f"{r['statistic_difference']:.5f}",
                 r["lag_level"], r["lag_difference"]]
                for r in data["unit_root"]
            ],
        )
        tables["diagnostics"] = _csv_text(
            ["var", "lag_order", "normality_p", "arch_p"],
            [
                [r["var"], r["lag_order"], f"{r['normality_p']:.6g}", f"{r['arch_p']:.6g}"]
                for r in data["diagnostics"]
            ],
        )
        tables["causality"] = _csv_text(
            ["null_hypothesis", "test_value", "cv_1pct", "cv_5pct", "cv_10pct",
             "causal_parameter", "lag_order", "significance"],
            [
                [r["null_hypothesis"], f"{r['test_value']:.3f}", f"{r['cv_1pct']:.3f}",
                 f"{r['cv_5pct']:.3f}", f"{r['cv_10pct']:.3f}",
                 f"{r['causal_parameter']:.4f}", r["lag_order"], r["significance"]]
                for r in data["causality"]
            ],
        )
        return tables
    if fmt == "text":
        return _render_text(data)
    raise ConfigError(f"unknown output format {fmt!r}")


def _render_text(data: dict) -> str:
    lines = []
    lines.append("Unit root tests (MZa, GLS-detrended)")
    lines.append(f"{'SERIES':<8}{'LEVEL':>12}{'FIRST DIFF':>14}")
    for r in data["unit_root"]:
        lines.append(
            f"{r['series']:<8}{r['statistic_level']:>12.5f}{r['statistic_difference']:>14.5f}"
        )
    cvs = data["unit_root"][0]["critical_values"]
    lines.append(
        f"critical values: 1% {cvs['1%']}, 5% {cvs['5%']}, 10% {cvs['10%']}"
    )
    lines.append("")
    lines.append("Residual diagnostics per VAR")
    lines.append(f"{'VAR':<12}{'LAG':>4}{'NORMALITY P':>14}{'ARCH P':>12}")
    for r in data["diagnostics"]:
        lines.append(
            f"{r['var']:<12}{r['lag_order']:>4}{r['normality_p']:>14.6f}{r['arch_p']:>12.6f}"
        )
    lines.append("")
    lines.append("Causality tests (bootstrap critical values)")
    lines.append(
        f"{'NULL':<14}{'VALUE':>9}{'CV 1%':>9}{'CV 5%':>9}{'CV 10%':>9}"
        f"{'PARAM':>10}{'LAG':>5}  SIG"
    )
    for r in data["causality"]:
        lines.append(
            f"{r['null_hypothesis']:<14}{r['test_value']:>9.3f}{r['cv_1pct']:>9.3f}"
            f"{r['cv_5pct']:>9.3f}{r['cv_10pct']:>9.3f}{r['causal_parameter']:>10.4f}"
            f"{r['lag_order']:>5}  {r['significance']}"
        )
    lines.append("")
    prov = data["provenance"]
    lines.append(
        f"seed {prov['master_seed']}, {prov['bootstrap_replications']} bootstrap "
        f"replications, window {prov['window']}, l_max {prov['l_max']}, "
        f"augmentation {prov['augmentation']}"
    )
    return "\n".join(lines) + "\n"
