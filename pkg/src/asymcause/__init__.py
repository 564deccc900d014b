"""Asymmetric Granger causality testing with leveraged bootstrap inference.

The package splits integrated series into cumulative positive and negative
components, estimates VARs with information-criterion lag selection, runs
lag-augmented Wald non-causality tests, and generates data-specific critical
values by leveraged residual bootstrap, together with the usual pre-tests
(unit roots, multivariate normality, multivariate ARCH).
"""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, BootstrapResult, bootstrap_cvs, empirical_quantile
from .causality import (
    CausalityResult,
    RestrictionSet,
    build_restrictions,
    chi_square_upper_tail,
    wald_test,
)
from .decompose import ComponentPair, decompose, recompose
from .diagnostics import (
    MvDiagnostics,
    UnitRootResult,
    doornik_hansen,
    mv_arch_test,
    ng_perron_mza,
)
from .series import TimeSeries, format_period, parse_period
from .varmodel import VarFit, VarSpec, estimate_var, hjc, leverages, select_lag

__all__ = [
    "BootstrapConfig",
    "BootstrapResult",
    "CausalityResult",
    "ComponentPair",
    "MvDiagnostics",
    "RestrictionSet",
    "TimeSeries",
    "UnitRootResult",
    "VarFit",
    "VarSpec",
    "bootstrap_cvs",
    "build_restrictions",
    "chi_square_upper_tail",
    "decompose",
    "doornik_hansen",
    "empirical_quantile",
    "estimate_var",
    "format_period",
    "hjc",
    "leverages",
    "mv_arch_test",
    "ng_perron_mza",
    "parse_period",
    "recompose",
    "select_lag",
    "wald_test",
]
