"""Detrended fluctuation analysis with Monte Carlo calibration of the Hurst estimator."""

from .dfa import (
    FluctuationCurve,
    HurstEstimate,
    box_detrend_residuals,
    dfa_estimate,
    fit_hurst,
    fluctuation,
)
from .divisor import (
    AllFrom,
    ConsecutiveWindow,
    DivisorPlan,
    Explicit,
    LowestCount,
    case_a_plan,
    case_b_plan,
    divisors_of,
    resolve_plan,
)
from .errors import HurstLabError
from .mc import (
    Fgn,
    Gaussian,
    McConfig,
    McSummary,
    SweepResult,
    calibrate_tables,
    quantile_intervals,
    run_mc,
    sweep_divisor_choice,
    sweep_divisor_count,
)
from .series import Profile, RawSeries, ReturnSeries, SeriesKind, build_profile, log_returns
from .synth import SeedSpec, fgn_series, gaussian_series

__version__ = "0.1.0"
