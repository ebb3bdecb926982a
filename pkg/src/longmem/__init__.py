"""Time-varying long-range dependence estimation for financial return series."""

from .estimators import (
    DEFAULT_LADDER_SIZES,
    BlockLadder,
    HurstEstimate,
    dfa_fluctuation,
    dfa_profile,
    estimate_from_points,
    fit_power_law,
    hurst_dfa,
    hurst_rs,
    rs_statistic,
)
from .pipeline import RunConfig, emit_synth, ingest_csv, run_pipeline
from .rolling import (
    RollingProtocol,
    RollingResult,
    WindowEstimate,
    rolling_hurst,
    split_at,
    window_count,
)
from .series import (
    DescriptiveStats,
    PriceSeries,
    ReturnSeries,
    describe,
    jarque_bera,
    log_returns,
)
from .stattests import (
    TestReport,
    build_report,
    levene,
    mann_whitney,
    t_bounds,
)
from .synth import FgnSpec, generate_fgn, generate_gaussian, powerlaw_fixture

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LADDER_SIZES",
    "BlockLadder",
    "HurstEstimate",
    "dfa_fluctuation",
    "dfa_profile",
    "estimate_from_points",
    "fit_power_law",
    "hurst_dfa",
    "hurst_rs",
    "rs_statistic",
    "RunConfig",
    "emit_synth",
    "ingest_csv",
    "run_pipeline",
    "RollingProtocol",
    "RollingResult",
    "WindowEstimate",
    "rolling_hurst",
    "split_at",
    "window_count",
    "DescriptiveStats",
    "PriceSeries",
    "ReturnSeries",
    "describe",
    "jarque_bera",
    "log_returns",
    "TestReport",
    "build_report",
    "levene",
    "mann_whitney",
    "t_bounds",
    "FgnSpec",
    "generate_fgn",
    "generate_gaussian",
    "powerlaw_fixture",
]
